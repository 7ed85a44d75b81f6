"""
Pruebas del estadístico de la condición necesaria y de la búsqueda de evidencia
"""

import numpy as np
import pytest

from src.core.measures import BernoulliMeasure, EmpiricalMeasure, ball_measure_bernoulli_exact
from src.core.witness import greedy_funny_word, non_atn_evidence, theorem21_statistic
from src.models.probability import ProbabilityVector
from src.models.symbolic import FunnyWord, Support
from src.models.witness import VERDICT_MET, VERDICT_VIOLATED, Theorem21Instance
from src.utils.constants import COUNT_CACHE_SUPPORTS


def test_estadistico_bernoulli_exacto(biased_coin):
    """Con Bernoulli el estadístico es la suma exacta y no tiene margen."""
    w1 = FunnyWord.from_one_based([0, 1, 2, 3], [2, 2, 1, 2], 2)
    w2 = FunnyWord.from_one_based([5, 7], [2, 2], 2)
    inst = Theorem21Instance.from_words([w1, w2], eps=0.3, delta=0.1)
    reporte = theorem21_statistic(inst, biased_coin)
    esperado = 4 * ball_measure_bernoulli_exact(biased_coin.p, w1, 0.3) + \
        2 * ball_measure_bernoulli_exact(biased_coin.p, w2, 0.3)
    assert reporte.statistic == pytest.approx(esperado)
    assert reporte.margin == 0
    assert reporte.threshold == pytest.approx(0.9)


def test_palabra_voraz_es_la_moda(biased_coin, fair_coin):
    """La palabra voraz toma el símbolo más probable; los empates van al menor."""
    soporte = Support.interval(0, 4)
    assert greedy_funny_word(biased_coin, soporte).symbols == (1,) * 5
    assert greedy_funny_word(fair_coin, soporte).symbols == (0,) * 5


def test_moneda_justa_viola_la_condicion(fair_coin):
    """Bernoulli(1/2, 1/2), ε=0.1, n=2, |Λ|=60: el mejor estadístico queda bajo 0.9."""
    evidencia = non_atn_evidence(fair_coin, 2, 0.1, 0.1, 60, search_budget=20, seed=0)
    assert evidencia.best.statistic < 0.9
    assert evidencia.verdict == VERDICT_VIOLATED
    assert len(evidencia.log) == 2
    assert evidencia.to_dict()["verdict"] == VERDICT_VIOLATED


def test_medida_constante_cumple_la_condicion():
    """Una medida empírica concentrada en una palabra satisface la condición."""
    em = EmpiricalMeasure((0, 9), np.zeros((50, 10), dtype=np.uint8), 2)
    palabra = FunnyWord(Support.interval(0, 4), (0,) * 5, 2)
    reporte = theorem21_statistic(Theorem21Instance.from_words([palabra], 0.1, 0.1), em)
    assert reporte.statistic == pytest.approx(5)
    assert reporte.condition_met
    assert reporte.verdict == VERDICT_MET


def test_busqueda_en_medida_empirica_escala_sin_empeorar(rng):
    """La escalada nunca reduce el puntaje del mejor candidato."""
    muestras = (rng.random((400, 12)) < 0.7).astype(np.uint8)
    em = EmpiricalMeasure((0, 11), muestras, 2, seed=1)
    evidencia = non_atn_evidence(em, 2, 0.25, 0.1, [4, 6], search_budget=10, seed=3)
    for entrada in evidencia.log:
        assert entrada["score"] >= entrada["initial_score"]
    assert [len(w) for w in evidencia.best.instance.words] == [4, 6]
    assert evidencia.best.margin > 0


def test_busqueda_reproducible(fair_coin):
    """Misma semilla, mismas palabras; el número de hilos no cambia el resultado."""
    a = non_atn_evidence(fair_coin, 2, 0.2, 0.1, 8, search_budget=6, seed=9)
    b = non_atn_evidence(fair_coin, 2, 0.2, 0.1, 8, search_budget=6, seed=9, workers=3)
    assert a.to_dict() == b.to_dict()


def test_parametros_invalidos(fair_coin):
    """Presupuesto < 1, tamaños que no cuadran con n o que no caben en la ventana."""
    with pytest.raises(ValueError):
        non_atn_evidence(fair_coin, 2, 0.1, 0.1, 10, search_budget=0)
    with pytest.raises(ValueError):
        non_atn_evidence(fair_coin, 2, 0.1, 0.1, [10], search_budget=5)
    with pytest.raises(ValueError):
        non_atn_evidence(fair_coin, 1, 0.1, 0.1, 10, search_budget=5, window=(0, 4))
    with pytest.raises(ValueError):
        Theorem21Instance.from_words([FunnyWord.from_one_based([0], [1], 2)], eps=1.5, delta=0.1)


def test_estadistico_no_decrece_con_el_radio(biased_coin):
    """Con palabras y soportes fijos el estadístico es no decreciente en ε."""
    palabras = [FunnyWord.from_one_based(range(10), [2, 1, 2, 2, 1, 2, 2, 2, 1, 2], 2),
                FunnyWord.from_one_based([0, 3, 7, 12, 20], [1, 2, 2, 1, 2], 2)]
    valores = [theorem21_statistic(Theorem21Instance.from_words(palabras, float(eps), 0.1), biased_coin).statistic
               for eps in np.linspace(0.02, 0.98, 49)]
    assert all(b >= a - 1e-12 for a, b in zip(valores, valores[1:]))


def test_bernoulli_intercambiable_misma_bola(rng):
    """Con p uniforme toda palabra da la misma bola; con p general basta el mismo multiconjunto de símbolos."""
    uniforme = BernoulliMeasure(ProbabilityVector.uniform(3))
    soporte = Support.from_iterable([0, 2, 3, 7, 8, 11, 15, 16])
    voraz = greedy_funny_word(uniforme, soporte)
    referencia = ball_measure_bernoulli_exact(uniforme.p, voraz, 0.3)
    for _ in range(20):
        aleatoria = FunnyWord(soporte, tuple(rng.integers(3, size=len(soporte)).tolist()), 3)
        assert ball_measure_bernoulli_exact(uniforme.p, aleatoria, 0.3) == pytest.approx(referencia, abs=1e-14)

    sesgada = ProbabilityVector((0.1, 0.3, 0.6))
    base = FunnyWord(soporte, (0, 0, 1, 1, 1, 2, 2, 2), 3)
    medida = ball_measure_bernoulli_exact(sesgada, base, 0.3)
    for _ in range(20):
        permutada = FunnyWord(soporte, tuple(int(s) for s in rng.permutation(base.symbols)), 3)
        assert ball_measure_bernoulli_exact(sesgada, permutada, 0.3) == pytest.approx(medida, abs=1e-14)


def test_furstenberg_no_alcanza_el_umbral(furstenberg_measure):
    """k=2, ε=1/12, n=2: el mejor estadístico encontrado no supera 1 - 1/25 más el margen."""
    evidencia = non_atn_evidence(furstenberg_measure, 2, 1 / 12, 1 / 25, 10, search_budget=10, seed=4)
    assert evidencia.best.threshold == pytest.approx(0.96)
    assert evidencia.best.statistic <= 0.96 + evidencia.best.margin
    assert evidencia.verdict == VERDICT_VIOLATED


def test_busqueda_no_acumula_mapas_de_conteo(monkeypatch, rng):
    """En modo de mapas de conteo la caché queda acotada tras una búsqueda con muchos soportes."""
    monkeypatch.setattr("src.core.measures.RAW_SAMPLE_LIMIT", 10)
    em = EmpiricalMeasure((0, 39), rng.integers(2, size=(2000, 40)), 2)
    assert em.uses_count_maps
    evidencia = non_atn_evidence(em, 2, 0.1, 0.1, 12, search_budget=60, seed=0)
    assert evidencia.evaluated > COUNT_CACHE_SUPPORTS
    assert em.cached_supports <= COUNT_CACHE_SUPPORTS
