"""
Simulador del producto sesgado de Furstenberg

T(s, t) = (s + α, 2s + t + α) mod 1 sobre el 2-toro, la codificación
por franjas horizontales de ancho 1/(k+1) hacia Σ_{k+1}, sumas de
caracteres y las verificaciones cuantitativas (correlaciones de pares,
E|S|² = |Λ|, cota de Markov, desigualdad de la bola pequeña, clases
de rotación).

Las órbitas usan la forma cerrada
    T^n(s, t) = (s + nα, t + n²α + 2ns) mod 1
con productos compensados (Dekker) antes de reducir módulo 1.
"""

import cmath
import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import qmc

from ..models.symbolic import FunnyWord, Support, Word
from ..models.torus import CharacterSum, CheckReport, SkewParams, TorusPoint
from ..utils.constants import MAX_ORBIT_INDEX, THREE_SIGMA_CONFIDENCE
from ..utils.rng import block_rng, derive_seed, make_rng, sample_blocks
from .errors import AlphabetError, SupportMismatchError
from .measures import EmpiricalMeasure, ball_measure_empirical
from .symbolic_core import strict_radius_count

logger = logging.getLogger(__name__)

SAMPLERS = ("iid", "sobol")

# Constante de partición de Veltkamp para float64
_SPLITTER = 134217729.0

# Holgura para comparaciones estrictas de |S| contra un umbral racional
_MODULUS_TOLERANCE = 1e-9


# ==================== ARITMÉTICA MÓDULO 1 ====================

def _split(a: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    c = _SPLITTER * a
    alto = c - (c - a)
    return alto, a - alto


def two_product(a, b) -> Tuple[np.ndarray, np.ndarray]:
    """
    Producto exacto a·b = p + e con p = fl(a·b) (algoritmo de Dekker).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p = a * b
    a_hi, a_lo = _split(a)
    b_hi, b_lo = _split(b)
    e = ((a_hi * b_hi - p) + a_hi * b_lo + a_lo * b_hi) + a_lo * b_lo
    return p, e


def frac(x) -> np.ndarray:
    """Parte fraccionaria en [0, 1)."""
    x = np.asarray(x, dtype=np.float64)
    r = x - np.floor(x)
    return np.where(r >= 1.0, 0.0, r)


def frac_product(a, b) -> np.ndarray:
    """⟨a·b⟩ sin perder los bits fraccionarios cuando a·b es grande."""
    p, e = two_product(a, b)
    return frac(frac(p) + e)


def _check_indices(ns: np.ndarray) -> None:
    if ns.size and np.abs(ns).max() > MAX_ORBIT_INDEX:
        raise ValueError(f"|n| no puede exceder {MAX_ORBIT_INDEX} (precisión de la forma cerrada)")


# ==================== ÓRBITAS ====================

def orbit_arrays(s, t, alpha: float, ns: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Forma cerrada vectorizada de T^n(s, t) para varios puntos y varios n.

    Args:
        s, t: Arreglos (N,) o escalares
        alpha: Rotación α
        ns: Índices n (L,)

    Returns:
        (s_n, t_n): matrices (N, L)
    """
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    n = np.asarray(ns, dtype=np.int64)
    _check_indices(n)
    n_f = n.astype(np.float64)

    s_n = frac(s[:, None] + frac_product(n_f, alpha)[None, :])
    cuadratico = frac_product(n_f * n_f, alpha)[None, :]
    cruzado = frac_product(2.0 * n_f[None, :], s[:, None])
    t_n = frac(t[:, None] + cuadratico + cruzado)
    return s_n, t_n


def _alpha_of(alpha_or_params: float | SkewParams) -> float:
    if isinstance(alpha_or_params, SkewParams):
        return alpha_or_params.alpha
    return float(alpha_or_params)


def skew_orbit(z: TorusPoint, alpha: float | SkewParams, n_from: int, n_to: int) -> List[TorusPoint]:
    """
    Puntos T^n(z) para n en [n_from, n_to] por la forma cerrada.

    Raises:
        ValueError: Si n_from > n_to
    """
    if n_from > n_to:
        raise ValueError(f"n_from ({n_from}) no puede ser mayor que n_to ({n_to})")
    s_n, t_n = orbit_arrays(z.s, z.t, _alpha_of(alpha), np.arange(n_from, n_to + 1))
    return [TorusPoint(s, t) for s, t in zip(s_n[0], t_n[0])]


def iterate_orbit(z: TorusPoint, alpha: float | SkewParams, steps: int) -> List[TorusPoint]:
    """Órbita z, T z, ..., T^steps z aplicando T paso a paso."""
    a = _alpha_of(alpha)
    s, t = z.s, z.t
    puntos = [z]
    for _ in range(steps):
        s, t = (s + a) % 1.0, (2 * s + t + a) % 1.0
        puntos.append(TorusPoint(s, t))
    return puntos


def circular_distance(a, b) -> np.ndarray:
    """Distancia en el círculo R/Z."""
    d = np.abs(np.asarray(a) - np.asarray(b)) % 1.0
    return np.minimum(d, 1.0 - d)


def orbit_consistency(z: TorusPoint, alpha: float | SkewParams, steps: int) -> float:
    """Máxima discrepancia circular entre la forma cerrada y la iteración."""
    cerrada = skew_orbit(z, alpha, 0, steps)
    iterada = iterate_orbit(z, alpha, steps)
    s_err = circular_distance([p.s for p in cerrada], [p.s for p in iterada])
    t_err = circular_distance([p.t for p in cerrada], [p.t for p in iterada])
    return float(max(s_err.max(), t_err.max()))


def rotate(z: TorusPoint, params: SkewParams) -> TorusPoint:
    """R(s, t) = (s, t + 1/(k+1)); conmuta con T."""
    return TorusPoint(z.s, z.t + params.strip_width)


# ==================== CODIFICACIÓN ====================

def strip_index(t_values: np.ndarray, params: SkewParams) -> np.ndarray:
    """Símbolo 0-based i con t ∈ [i/(k+1), (i+1)/(k+1))."""
    simbolos = np.floor(np.asarray(t_values) * params.symbols).astype(np.int64)
    return np.minimum(simbolos, params.k).astype(np.uint8)


def code_indices(s, t, params: SkewParams, ns: Sequence[int]) -> np.ndarray:
    """Códigos x_n de varios puntos en los índices ns; matriz (N, L) uint8."""
    _, t_n = orbit_arrays(s, t, params.alpha, ns)
    return strip_index(t_n, params)


def code_point(z: TorusPoint, params: SkewParams, window: Tuple[int, int]) -> Word:
    """
    π(z) restringido a la ventana: x_n = i si T^n(z) ∈ A_i.
    """
    start, stop = window
    if stop < start:
        raise ValueError(f"Ventana vacía: [{start}, {stop}]")
    codigos = code_indices(z.s, z.t, params, np.arange(start, stop + 1))[0]
    return Word.from_symbols(start, codigos.tolist(), params.symbols)


# ==================== MUESTREO ====================

def _haar_points(count: int, seed: int, sampler: str) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Puntos Haar-uniformes en bloques fijos (block_index, s, t).

    iid: cada bloque con su propia corriente SeedSequence([seed, b]).
    sobol: Sobol aleatorizado (scrambled), generado en orden y luego partido.
    """
    if sampler not in SAMPLERS:
        raise ValueError(f"Muestreador desconocido: {sampler!r} (opciones: {SAMPLERS})")
    if sampler == "sobol":
        motor = qmc.Sobol(d=2, scramble=True, seed=make_rng(seed, "sobol"))
        for block_index, start, stop in sample_blocks(count):
            with warnings.catch_warnings():
                # Los bloques son potencias de 2 salvo el último
                warnings.simplefilter("ignore", UserWarning)
                puntos = motor.random(stop - start)
            yield block_index, puntos[:, 0], puntos[:, 1]
        return
    for block_index, start, stop in sample_blocks(count):
        rng = block_rng(seed, block_index)
        puntos = rng.random((stop - start, 2))
        yield block_index, puntos[:, 0], puntos[:, 1]


def _map_blocks(func: Callable, blocks, workers: int) -> list:
    """Aplica func por bloque conservando el orden (independiente de workers)."""
    if workers <= 1:
        return [func(b) for b in blocks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, blocks))


def coded_blocks(params: SkewParams, ns: Sequence[int], count: int, seed: int,
                 sampler: str = "iid", workers: int = 1) -> Iterator[np.ndarray]:
    """Palabras codificadas en los índices ns, bloque a bloque."""
    indices = np.asarray(ns, dtype=np.int64)
    puntos = list(_haar_points(count, seed, sampler))

    def codificar(bloque):
        _, s, t = bloque
        return code_indices(s, t, params, indices)

    # Lotes de tamaño acotado para no retener todas las matrices a la vez
    lote = max(1, workers) * 4
    for i in range(0, len(puntos), lote):
        yield from _map_blocks(codificar, puntos[i:i + lote], workers)


def sample_coded_measure(params: SkewParams, window: Tuple[int, int], count: int, seed: int,
                         sampler: str = "iid", workers: int = 1) -> EmpiricalMeasure:
    """
    ν̂: codifica N_s puntos Haar-uniformes sobre la ventana.

    El resultado depende solo de (params, window, count, seed, sampler).
    """
    if count < 1:
        raise ValueError(f"N_s debe ser >= 1, recibido: {count}")
    start, stop = window
    if stop < start:
        raise ValueError(f"Ventana vacía: [{start}, {stop}]")
    logger.info(f"🔄 Muestreando {count} palabras codificadas en [{start}, {stop}] (k={params.k}, semilla={seed})")
    bloques = list(coded_blocks(params, np.arange(start, stop + 1), count, seed, sampler, workers))
    muestras = np.concatenate(bloques, axis=0)
    em = EmpiricalMeasure((start, stop), muestras, params.symbols, seed=seed,
                          source=f"furstenberg(alpha={params.alpha}, k={params.k}, sampler={sampler})")
    logger.info(f"✅ Medida codificada lista: {em}")
    return em


# ==================== SUMAS DE CARACTERES ====================

def _roots(q: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(q) / q)


def difference_counts(rows: np.ndarray, base: np.ndarray, q: int) -> np.ndarray:
    """a_i por fila: cuántas posiciones cumplen y_j = x_j + i - 1 (mod q)."""
    diferencias = (rows.astype(np.int64) - base.astype(np.int64)[None, :]) % q
    conteos = np.empty((rows.shape[0], q), dtype=np.int64)
    for i in range(q):
        conteos[:, i] = (diferencias == i).sum(axis=1)
    return conteos


def character_sum(y: FunnyWord, x: FunnyWord) -> CharacterSum:
    """
    S = Σ_{j∈Λ} ε^((y_j - x_j) mod (k+1)) con ε = exp(2πi/(k+1)).

    Raises:
        SupportMismatchError: Si y, x no comparten soporte
        AlphabetError: Si y, x usan alfabetos distintos
    """
    if y.support != x.support:
        raise SupportMismatchError()
    if y.k != x.k:
        raise AlphabetError(f"y usa {y.k} símbolos y x usa {x.k}")
    q = x.k
    conteos = difference_counts(y.as_array()[None, :], x.as_array(), q)[0]
    raiz = cmath.exp(2j * math.pi / q)
    valor = sum(int(a) * raiz**i for i, a in enumerate(conteos))
    return CharacterSum(x, x.support, complex(valor), tuple(int(a) for a in conteos))


def _base_word(params: SkewParams, support: Support, x: Optional[FunnyWord], seed: int) -> FunnyWord:
    """Palabra base: la dada o la codificación de un punto Haar aleatorio."""
    if x is not None:
        if x.support != support:
            raise SupportMismatchError()
        return x
    rng = make_rng(derive_seed(seed, "base_word"))
    s, t = rng.random(2)
    codigos = code_indices(s, t, params, support.as_array())[0]
    return FunnyWord(support, tuple(int(c) for c in codigos), params.symbols)


def _character_stream(params: SkewParams, support: Support, base: FunnyWord, count: int, seed: int,
                      sampler: str, workers: int) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """(conteos a_i, |S|) por bloque de muestras."""
    q = params.symbols
    raices = _roots(q)
    x = base.as_array()
    for bloque in coded_blocks(params, support.as_array(), count, seed, sampler, workers):
        conteos = difference_counts(bloque, x, q)
        yield conteos, np.abs(conteos @ raices)


# ==================== VERIFICACIONES ====================

def second_moment_check(params: SkewParams, support: Support, x: Optional[FunnyWord], count: int,
                        seed: int, sampler: str = "iid", workers: int = 1) -> CheckReport:
    """E(|S|²) = |Λ|: media muestral de |S|² contra |Λ| con margen 3σ."""
    base = _base_word(params, support, x, seed)
    n = len(support)
    suma = 0.0
    suma_cuadrados = 0.0
    for _, modulo in _character_stream(params, support, base, count, seed, sampler, workers):
        cuadrado = modulo**2
        suma += float(cuadrado.sum())
        suma_cuadrados += float((cuadrado**2).sum())
    media = suma / count
    varianza = max(0.0, suma_cuadrados / count - media**2)
    sigma = math.sqrt(varianza / count)
    passed = abs(media - n) <= 3 * sigma
    logger.info(f"📊 E|S|² ≈ {media:.4f} (|Λ| = {n}, σ = {sigma:.4f})")
    return CheckReport("second_moment", media, float(n), sigma, passed,
                       {"support_size": n, "base_word": base.to_text(), "samples": count, "seed": seed,
                        "sampler": sampler, "ratio": media / n})


def markov_tail_check(params: SkewParams, support: Support, x: Optional[FunnyWord], count: int,
                      seed: int, sampler: str = "iid", workers: int = 1) -> CheckReport:
    """
    ν(|S| > (2k+1)/(2k+2)·n) <= ((2k+2)²/(2k+1)²)·(1/n), con margen 3σ.
    """
    base = _base_word(params, support, x, seed)
    n = len(support)
    nivel = float(params.tail_level) * n
    en_cola = 0
    for _, modulo in _character_stream(params, support, base, count, seed, sampler, workers):
        en_cola += int((modulo > nivel + _MODULUS_TOLERANCE).sum())
    frecuencia = en_cola / count
    sigma = math.sqrt(frecuencia * (1 - frecuencia) / count)
    cota = params.markov_bound(n)
    passed = frecuencia <= cota + 3 * sigma
    logger.info(f"📊 Cola de Markov: {frecuencia:.6f} <= {cota:.6f}? {'sí' if passed else 'no'}")
    return CheckReport("markov_tail", frecuencia, cota, sigma, passed,
                       {"support_size": n, "level": nivel, "base_word": base.to_text(), "samples": count,
                        "seed": seed, "sampler": sampler})


def ineq3_check(params: SkewParams, support: Support, x: Optional[FunnyWord], count: int, seed: int,
                sampler: str = "iid", workers: int = 1) -> CheckReport:
    """
    k·|Λ|·ν(B_{1/(4k+4), x, Λ}) <= 1 - 1/(4k²+4k+1), con margen de 3 semianchos.
    """
    base = _base_word(params, support, x, seed)
    n = len(support)
    em = sample_coded_measure(params, (support.start, support.stop), count, seed, sampler, workers)
    bola = ball_measure_empirical(em, base, params.ball_radius, THREE_SIGMA_CONFIDENCE, workers=workers)
    factor = params.k * n
    estadistico = factor * bola.estimate
    margen = factor * bola.half_width
    sigma = factor * math.sqrt(bola.estimate * (1 - bola.estimate) / count)
    umbral = params.ineq3_threshold
    passed = estadistico <= umbral + margen
    logger.info(f"📊 k·|Λ|·ν(B) = {estadistico:.6f} vs {umbral:.6f}")
    return CheckReport("ineq3", estadistico, umbral, sigma, passed,
                       {"support_size": n, "radius": params.ball_radius, "ball": bola.to_dict(),
                        "margin": margen, "base_word": base.to_text(), "samples": count, "seed": seed,
                        "sampler": sampler})


def rotation_class_check(params: SkewParams, support: Support, x: Optional[FunnyWord], count: int,
                         seed: int, sampler: str = "iid", workers: int = 1) -> CheckReport:
    """
    Clases A_i = {y ∈ A: a_i(y) > a_j(y) ∀ j ≠ i} con A = {|S| > (2k+1)/(2k+2)·n}.

    Verifica que las k+1 clases tengan la misma masa (dentro de 3σ) y que
    toda muestra en la bola B_{1/(4k+4)} caiga en A_1.
    """
    base = _base_word(params, support, x, seed)
    n = len(support)
    q = params.symbols
    nivel = float(params.tail_level) * n
    k_max = strict_radius_count(params.ball_radius, n)
    masas = np.zeros(q, dtype=np.int64)
    en_cola = 0
    en_bola = 0
    fuera_de_a1 = 0
    for conteos, modulo in _character_stream(params, support, base, count, seed, sampler, workers):
        cola = modulo > nivel + _MODULUS_TOLERANCE
        en_cola += int(cola.sum())
        ordenados = np.sort(conteos, axis=1)
        unico = ordenados[:, -1] > ordenados[:, -2]
        ganador = np.argmax(conteos, axis=1)
        clase = cola & unico
        masas += np.bincount(ganador[clase], minlength=q)
        bola = (n - conteos[:, 0]) <= k_max
        en_bola += int(bola.sum())
        fuera_de_a1 += int((bola & ~(clase & (ganador == 0))).sum())

    frecuencias = masas / count
    media = float(frecuencias.mean())
    sigma = math.sqrt(media * (1 - media) / count)
    desviacion = float(np.abs(frecuencias - media).max())
    iguales = desviacion <= 3 * sigma
    passed = iguales and fuera_de_a1 == 0
    return CheckReport("rotation_classes", desviacion, 3 * sigma, sigma, passed,
                       {"class_masses": frecuencias.tolist(), "tail_mass": en_cola / count,
                        "ball_samples": en_bola, "ball_outside_A1": fuera_de_a1,
                        "base_word": base.to_text(), "samples": count, "seed": seed, "sampler": sampler})


def ball_implication_check(params: SkewParams, support: Support, x: Optional[FunnyWord], count: int,
                           seed: int, sampler: str = "iid", workers: int = 1) -> CheckReport:
    """d(y, x) < 1/(4k+4) ⇒ |S(y)| > (2k+1)/(2k+2)·|Λ| en todas las muestras."""
    base = _base_word(params, support, x, seed)
    n = len(support)
    nivel = float(params.tail_level) * n
    k_max = strict_radius_count(params.ball_radius, n)
    en_bola = 0
    violaciones = 0
    for conteos, modulo in _character_stream(params, support, base, count, seed, sampler, workers):
        bola = (n - conteos[:, 0]) <= k_max
        en_bola += int(bola.sum())
        violaciones += int((bola & ~(modulo > nivel + _MODULUS_TOLERANCE)).sum())
    return CheckReport("ball_implication", float(violaciones), 0.0, 0.0, violaciones == 0,
                       {"ball_samples": en_bola, "base_word": base.to_text(), "samples": count, "seed": seed})


def rotation_covariance_check(params: SkewParams, window: Tuple[int, int], count: int, seed: int) -> CheckReport:
    """code(R z)_n = code(z)_n + 1 (mod k+1), exacto, en puntos muestreados."""
    rng = make_rng(derive_seed(seed, "rotation"))
    s, t = rng.random(count), rng.random(count)
    indices = np.arange(window[0], window[1] + 1)
    original = code_indices(s, t, params, indices).astype(np.int64)
    rotado = code_indices(s, frac(t + params.strip_width), params, indices).astype(np.int64)
    discrepancias = int(((original + 1) % params.symbols != rotado).sum())
    return CheckReport("rotation_covariance", float(discrepancias), 0.0, 0.0, discrepancias == 0,
                       {"points": count, "window": list(window), "seed": seed})


def pair_correlations(params: SkewParams, lags: Sequence[int], count: int, seed: int,
                      sampler: str = "iid", workers: int = 1) -> CheckReport:
    """
    ν̂(y_0 = i, y_n = j) contra 1/(k+1)² para cada par (i, j) y cada rezago n.

    Cada celda pasa si |ν̂ - 1/(k+1)²| < 3·sqrt(ν̂(1-ν̂)/N_s).
    """
    lags = sorted({int(n) for n in lags})
    if not lags or lags[0] < 1:
        raise ValueError(f"Los rezagos deben ser enteros >= 1, recibido: {lags}")
    q = params.symbols
    esperado = 1.0 / q**2
    em = sample_coded_measure(params, (0, lags[-1]), count, seed, sampler, workers)
    muestras = em.samples.astype(np.int64)

    filas = []
    peor = 0.0
    sigma_max = 0.0
    todo_bien = True
    for n in lags:
        conjunto = muestras[:, 0] * q + muestras[:, n]
        frecuencias = np.bincount(conjunto, minlength=q * q) / count
        for codigo, frecuencia in enumerate(frecuencias):
            i, j = divmod(codigo, q)
            sigma = math.sqrt(frecuencia * (1 - frecuencia) / count)
            desviacion = abs(frecuencia - esperado)
            ok = desviacion < 3 * sigma
            todo_bien &= ok
            peor = max(peor, desviacion)
            sigma_max = max(sigma_max, sigma)
            filas.append({"lag": n, "i": i + 1, "j": j + 1, "frequency": float(frecuencia),
                          "expected": esperado, "sigma": sigma, "pass": ok})
    logger.info(f"📊 Correlaciones de pares: desviación máxima {peor:.2e} (σ máx {sigma_max:.2e})")
    return CheckReport("pair_correlations", peor, esperado, sigma_max, todo_bien,
                       {"rows": filas, "samples": count, "seed": seed, "sampler": sampler})
