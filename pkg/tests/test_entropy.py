"""
Pruebas de entropía por bloques
"""

import math

import numpy as np
import pytest

from src.core.entropy import (
    bernoulli_entropy_exact,
    block_entropy,
    entropy_profile,
    shannon_entropy,
    write_profile_csv,
)
from src.core.errors import EnumerationBudgetError
from src.core.measures import BernoulliMeasure, EmpiricalMeasure
from src.models.probability import ProbabilityVector
from src.utils.constants import CSV_ENTROPY_COLUMNS


def test_moneda_justa_tres_bloques(fair_coin):
    """Bernoulli uniforme k=2, m=3 da 3·ln 2."""
    assert block_entropy(fair_coin, 3) == pytest.approx(3 * math.log(2), abs=1e-12)


def test_entropia_sesgada(biased_coin):
    """p=(0.2,0.8), m=1 ≈ 0.5004."""
    assert block_entropy(biased_coin, 1) == pytest.approx(0.5004, abs=1e-4)


def test_entropia_exacta_bernoulli():
    """Uniforme sobre k símbolos da ln k; (0.5,0.5) da ln 2."""
    for k in range(2, 6):
        assert bernoulli_entropy_exact(ProbabilityVector.uniform(k)) == pytest.approx(math.log(k))
    casi_degenerada = ProbabilityVector((1e-12, 1.0))
    assert bernoulli_entropy_exact(casi_degenerada) < 1e-10


def test_tasa_bernoulli_constante(rng):
    """|H_m/m - h(p)| < 1e-9 para k <= 4 y m <= 8."""
    for k in range(2, 5):
        p = ProbabilityVector(tuple(rng.random(k) + 0.05))
        perfil = entropy_profile(BernoulliMeasure(p), 8)
        exacta = bernoulli_entropy_exact(p)
        for rate in perfil.rates:
            assert abs(rate - exacta) < 1e-9
        assert perfil.exact


def test_medida_puntual_entropia_cero():
    """Una medida empírica de una sola muestra tiene H_m = 0."""
    em = EmpiricalMeasure((0, 5), np.array([[0, 1, 2, 0, 1, 2]]), 3)
    perfil = entropy_profile(em, 6)
    assert all(h == 0 for h in perfil.block_entropies)
    assert shannon_entropy(np.array([1.0, 0.0])) == 0


def test_tasa_furstenberg_decreciente(furstenberg_measure):
    """El sistema sesgado codificado tiene H_m/m estrictamente decreciente en m = 2..10."""
    perfil = entropy_profile(furstenberg_measure, 10)
    tasas = perfil.rates
    for anterior, siguiente in zip(tasas[1:], tasas[2:]):
        assert siguiente < anterior
    assert perfil.bias_note is not None
    assert not perfil.exact


def test_incrementos_no_negativos(biased_coin):
    """H_m es no decreciente en m."""
    perfil = entropy_profile(biased_coin, 6)
    assert all(inc >= -1e-12 for inc in perfil.increments)


def test_subaditividad_oraculos_exactos():
    """H_{m+1} <= H_m + H_1 para Bernoulli con k y p aleatorios."""
    rng = np.random.default_rng(77)
    for _ in range(20):
        k = int(rng.integers(2, 5))
        mu = BernoulliMeasure(ProbabilityVector(tuple(rng.random(k) + 0.05)))
        h1 = block_entropy(mu, 1)
        for m in range(1, 8):
            assert block_entropy(mu, m + 1) <= block_entropy(mu, m) + h1 + 1e-9


def test_bloque_mas_largo_que_ventana():
    """m mayor que la ventana empírica es un error."""
    em = EmpiricalMeasure((0, 2), np.zeros((4, 3), dtype=int), 2)
    with pytest.raises(EnumerationBudgetError):
        block_entropy(em, 4)


def test_csv_de_perfil(tmp_path, biased_coin):
    """El CSV trae la cabecera documentada y una fila por m."""
    perfil = entropy_profile(biased_coin, 4)
    texto = write_profile_csv(perfil, tmp_path / "perfil.csv")
    lineas = texto.strip().splitlines()
    assert lineas[0] == ",".join(CSV_ENTROPY_COLUMNS)
    assert len(lineas) == 5
    assert (tmp_path / "perfil.csv").read_text(encoding="utf-8") == texto
