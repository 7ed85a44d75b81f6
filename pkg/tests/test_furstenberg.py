"""
Pruebas del simulador del producto sesgado
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.stats import chi2

from src.core.errors import AlphabetError, SupportMismatchError
from src.core.furstenberg import (
    ball_implication_check,
    character_sum,
    circular_distance,
    code_point,
    difference_counts,
    frac_product,
    ineq3_check,
    iterate_orbit,
    markov_tail_check,
    orbit_consistency,
    pair_correlations,
    rotate,
    rotation_class_check,
    rotation_covariance_check,
    sample_coded_measure,
    second_moment_check,
    skew_orbit,
    two_product,
)
from src.models.symbolic import FunnyWord, Support
from src.models.torus import SkewParams, TorusPoint

ACCEPTANCE_SAMPLES = 10**6


# ==================== ÓRBITAS ====================

def test_orbita_de_un_punto():
    """n_from = n_to = 0 devuelve [z]."""
    z = TorusPoint(0.3, 0.7)
    assert skew_orbit(z, SkewParams(), 0, 0) == [z]


def test_orbita_alpha_cero():
    """Con α = 0: T(s,t) = (s, 2s+t) y T²(s,t) = (s, 4s+t)."""
    params = SkewParams(alpha=0.0, allow_rational=True)
    z = TorusPoint(0.125, 0.25)
    _, uno, dos = skew_orbit(z, params, 0, 2)
    assert (uno.s, uno.t) == pytest.approx((0.125, 0.5))
    assert (dos.s, dos.t) == pytest.approx((0.125, 0.75))


def test_forma_cerrada_contra_iteracion():
    """La forma cerrada y la iteración coinciden en 1e-9 hasta n = 10^4."""
    z = TorusPoint(0.123456789, 0.987654321)
    assert orbit_consistency(z, SkewParams(), 10**4) < 1e-9


def test_orbita_hacia_atras():
    """T^{-1} deshace T."""
    params = SkewParams()
    z = TorusPoint(0.4, 0.9)
    atras = skew_orbit(z, params, -1, -1)[0]
    adelante = iterate_orbit(atras, params, 1)[1]
    assert circular_distance(adelante.s, z.s) < 1e-12
    assert circular_distance(adelante.t, z.t) < 1e-12


def test_indices_fuera_de_rango():
    """|n| > 10^6 y n_from > n_to se rechazan."""
    z = TorusPoint(0.1, 0.2)
    with pytest.raises(ValueError):
        skew_orbit(z, SkewParams(), 0, 10**6 + 1)
    with pytest.raises(ValueError):
        skew_orbit(z, SkewParams(), 3, 2)


def test_producto_compensado_exacto(rng):
    """p + e es exactamente a·b."""
    for _ in range(200):
        a, b = rng.random() * 10**6, rng.random()
        p, e = two_product(a, b)
        assert Fraction(float(p)) + Fraction(float(e)) == Fraction(a) * Fraction(b)


def test_parte_fraccionaria_de_productos_grandes():
    """⟨n²α⟩ con n = 10^6 coincide con la aritmética racional."""
    alpha = SkewParams().alpha
    n2 = float(10**12)
    exacto = Fraction(n2) * Fraction(alpha)
    esperado = float(exacto - math.floor(exacto))
    assert circular_distance(float(frac_product(n2, alpha)), esperado) < 1e-12


def test_parametros_invalidos():
    """α racional y k < 2 se rechazan."""
    with pytest.raises(ValueError):
        SkewParams(alpha=0.5)
    with pytest.raises(ValueError):
        SkewParams(k=1)


# ==================== CODIFICACIÓN ====================

def test_codigo_constante():
    """Un punto con t = 0 en cada visita se codifica con el símbolo 1."""
    params = SkewParams(alpha=0.0, allow_rational=True)
    palabra = code_point(TorusPoint(0.0, 0.0), params, (0, 9))
    assert palabra.symbols == (0,) * 10


def test_codigo_franja_central():
    """k=2: t = 0.5 cae en [1/3, 2/3), símbolo 2."""
    palabra = code_point(TorusPoint(0.2, 0.5), SkewParams(), (0, 0))
    assert palabra.symbols == (1,)
    assert palabra.k == 3


def test_rotacion_conmuta_con_codigo():
    """code(R z)_n = code(z)_n + 1 (mod k+1) exacto en 10^3 puntos, ventana de 50."""
    reporte = rotation_covariance_check(SkewParams(), (0, 49), 1000, seed=3)
    assert reporte.passed
    assert reporte.statistic == 0


def test_rotacion_de_un_punto():
    """R suma 1/(k+1) a t."""
    rotado = rotate(TorusPoint(0.1, 0.9), SkewParams(k=3))
    assert rotado.t == pytest.approx(0.15)


# ==================== MUESTREO ====================

def test_una_muestra():
    """N_s = 1 da una medida con una muestra."""
    em = sample_coded_measure(SkewParams(), (0, 4), 1, seed=0)
    assert em.sample_count == 1
    assert em.window == (0, 4)


def test_muestreo_reproducible_e_independiente_de_workers():
    """La misma semilla da las mismas muestras con cualquier número de hilos."""
    params = SkewParams()
    uno = sample_coded_measure(params, (0, 5), 150000, seed=4, workers=1)
    varios = sample_coded_measure(params, (0, 5), 150000, seed=4, workers=3)
    otra = sample_coded_measure(params, (0, 5), 150000, seed=5)
    assert np.array_equal(uno.samples, varios.samples)
    assert not np.array_equal(uno.samples, otra.samples)


def test_marginal_uniforme():
    """La marginal de x_0 es uniforme sobre k+1 símbolos dentro de 3σ."""
    em = sample_coded_measure(SkewParams(), (0, 2), 10**5, seed=1, sampler="sobol")
    marginal = em.coordinate_marginal(0)
    sigma = math.sqrt((1 / 3) * (2 / 3) / em.sample_count)
    assert np.all(np.abs(marginal - 1 / 3) < 3 * sigma)


def test_muestreador_desconocido():
    """Solo 'iid' y 'sobol'."""
    with pytest.raises(ValueError):
        sample_coded_measure(SkewParams(), (0, 2), 10, seed=0, sampler="halton")


def test_correlaciones_de_pares():
    """ν̂(y_0=i, y_n=j) dentro de 3σ de 1/9 para todo (i,j) y n = 1..10."""
    reporte = pair_correlations(SkewParams(), range(1, 11), ACCEPTANCE_SAMPLES, seed=7, sampler="sobol")
    assert reporte.passed
    filas = reporte.details["rows"]
    assert len(filas) == 90
    assert {(f["i"], f["j"]) for f in filas} == {(i, j) for i in range(1, 4) for j in range(1, 4)}


def test_correlaciones_iid_chi_cuadrado(furstenberg_measure):
    """Con muestras i.i.d. las tablas de pares son compatibles con la uniforme (χ², p > 1e-4)."""
    muestras = furstenberg_measure.samples.astype(np.int64)
    esperado = muestras.shape[0] / 9
    for n in range(1, 10):
        conteos = np.bincount(muestras[:, 0] * 3 + muestras[:, n], minlength=9)
        estadistico = float(((conteos - esperado) ** 2 / esperado).sum())
        assert chi2.sf(estadistico, df=8) > 1e-4


# ==================== SUMAS DE CARACTERES ====================

def test_suma_de_caracteres_basica():
    """y = x da S = |Λ|; (1,2,3) contra (1,1,1) da S = 0."""
    x = FunnyWord.from_one_based([0, 1, 2], [1, 1, 1], 3)
    assert character_sum(x, x).value == pytest.approx(3)
    y = FunnyWord.from_one_based([0, 1, 2], [1, 2, 3], 3)
    suma = character_sum(y, x)
    assert suma.modulus == pytest.approx(0, abs=1e-12)
    assert suma.counts == (1, 1, 1)


def test_suma_de_caracteres_soportes_distintos():
    """Soportes distintos lanzan SupportMismatchError."""
    x = FunnyWord.from_one_based([0, 1], [1, 1], 3)
    y = FunnyWord.from_one_based([0, 2], [1, 1], 3)
    with pytest.raises(SupportMismatchError):
        character_sum(y, x)


def test_suma_de_caracteres_dos_simbolos():
    """Con dos símbolos ε = -1: y distinta de x en todas partes da S = -|Λ|."""
    x = FunnyWord.from_one_based(range(7), [1, 2, 1, 1, 2, 2, 1], 2)
    y = FunnyWord.from_one_based(range(7), [2, 1, 2, 2, 1, 1, 2], 2)
    suma = character_sum(y, x)
    assert suma.value.real == pytest.approx(-7)
    assert suma.value.imag == pytest.approx(0, abs=1e-12)
    assert suma.counts == (0, 7)


def test_suma_de_caracteres_alfabetos_distintos():
    """Palabras sobre alfabetos distintos lanzan AlphabetError."""
    x = FunnyWord.from_one_based([0, 1], [1, 1], 2)
    y = FunnyWord.from_one_based([0, 1], [1, 3], 3)
    with pytest.raises(AlphabetError):
        character_sum(y, x)
    with pytest.raises(AlphabetError):
        character_sum(x, y)


def test_conteos_de_diferencias(rng):
    """Los a_i suman |Λ| y |S| <= |Λ|."""
    filas = rng.integers(3, size=(100, 12))
    base = rng.integers(3, size=12)
    conteos = difference_counts(filas, base, 3)
    assert np.all(conteos.sum(axis=1) == 12)
    raices = np.exp(2j * np.pi * np.arange(3) / 3)
    assert np.all(np.abs(conteos @ raices) <= 12 + 1e-9)


@pytest.mark.parametrize("tamano", [10, 30, 100])
def test_segundo_momento(tamano):
    """E(|S|²) = |Λ| dentro de 3σ con 10^6 palabras codificadas."""
    reporte = second_moment_check(SkewParams(), Support.interval(0, tamano - 1), None, ACCEPTANCE_SAMPLES,
                                  seed=11, sampler="sobol")
    assert reporte.passed, str(reporte)
    assert reporte.bound == tamano


def test_cota_de_markov_y_bola_pequena():
    """Cola de Markov y k·|Λ|·ν(B) <= 1 - 1/25 con k=2, |Λ|=30, N_s=10^6."""
    params = SkewParams()
    soporte = Support.interval(0, 29)
    cola = markov_tail_check(params, soporte, None, ACCEPTANCE_SAMPLES, seed=5)
    assert cola.passed, str(cola)
    assert cola.bound == pytest.approx((6 / 5) ** 2 / 30)
    bola = ineq3_check(params, soporte, None, ACCEPTANCE_SAMPLES, seed=5)
    assert bola.passed, str(bola)
    assert bola.bound == pytest.approx(1 - 1 / 25)


def test_clases_de_rotacion():
    """Las clases A_i tienen la misma masa y la bola pequeña cae en A_1."""
    reporte = rotation_class_check(SkewParams(), Support.interval(0, 19), None, 200000, seed=2, sampler="sobol")
    assert reporte.details["ball_outside_A1"] == 0
    assert len(reporte.details["class_masses"]) == 3
    assert reporte.passed, str(reporte)


def test_implicacion_de_la_bola():
    """d(y, x) < 1/(4k+4) implica |S| > (2k+1)/(2k+2)·|Λ| en todas las muestras."""
    soporte = Support.interval(0, 11)
    x = FunnyWord(soporte, (0,) * 12, 3)
    reporte = ball_implication_check(SkewParams(), soporte, x, 100000, seed=8)
    assert reporte.passed
    assert reporte.statistic == 0


def test_palabra_base_con_otro_soporte():
    """La palabra base debe vivir en el soporte pedido."""
    x = FunnyWord(Support.interval(0, 3), (0, 0, 0, 0), 3)
    with pytest.raises(SupportMismatchError):
        markov_tail_check(SkewParams(), Support.interval(0, 4), x, 100, seed=0)
