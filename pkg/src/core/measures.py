"""
Medidas de cilindros y bolas de Hamming

- Exactas para medidas de Bernoulli (producto y DP de Poisson-binomial)
- Estimadas con intervalo de confianza para medidas empíricas
- Cotas binomial y de Stirling para bolas pequeñas

Los oráculos (BernoulliMeasure, EmpiricalMeasure) son de solo lectura
después de construirse y se pueden consultar desde varios hilos.
"""

import logging
import math
import threading
from abc import ABC, abstractmethod
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln
from scipy.stats import norm

from ..models.probability import BallEstimate, ProbabilityVector
from ..models.symbolic import FunnyWord, Support
from ..utils.constants import (
    COUNT_CACHE_SUPPORTS,
    DEFAULT_CONFIDENCE,
    ENUMERATION_BUDGET,
    RAW_SAMPLE_LIMIT,
    SAMPLING_BLOCK_SIZE,
    WILSON_THRESHOLD_COUNT,
)
from .errors import AlphabetError, EnumerationBudgetError, SupportOutOfRangeError
from .symbolic_core import as_rational, strict_radius_count

logger = logging.getLogger(__name__)

# Hasta aquí math.comb cabe sin problemas; más allá se trabaja en log
_EXACT_BINOMIAL_LIMIT = 30


# ==================== VALIDACIÓN ====================

def _check_open_unit(name: str, value) -> None:
    if not 0 < value < 1:
        raise ValueError(f"{name} debe estar en (0, 1), recibido: {value}")


def _check_symbols(p: ProbabilityVector, word: FunnyWord) -> None:
    for symbol in word.symbols:
        if symbol >= p.k:
            raise AlphabetError(f"Símbolo {symbol + 1} fuera del alfabeto de tamaño {p.k}")


def _check_budget(k: int, length: int) -> None:
    if length < 1 or k**length > ENUMERATION_BUDGET:
        raise EnumerationBudgetError()


# ==================== BERNOULLI EXACTO ====================

def cylinder_measure_bernoulli(p: ProbabilityVector, word: FunnyWord) -> float:
    """
    μ_p del cilindro: Π_{n∈Λ} p(W_n).

    Raises:
        AlphabetError: Si algún símbolo no existe en el alfabeto de p
    """
    _check_symbols(p, word)
    return math.prod(p[s] for s in word.symbols)


def poisson_binomial_pmf(probabilities: Sequence[float]) -> np.ndarray:
    """
    Función de masa del número de éxitos de ensayos independientes.

    Convolución sucesiva de la función generadora
    Π (1 - q + q·x); O(m²) operaciones.
    """
    pmf = np.array([1.0])
    for q in probabilities:
        siguiente = np.zeros(len(pmf) + 1)
        siguiente[:-1] = pmf * (1.0 - q)
        siguiente[1:] += pmf * q
        pmf = siguiente
    return pmf


def ball_measure_bernoulli_exact(p: ProbabilityVector, word: FunnyWord, eps: float | Fraction) -> float:
    """
    μ_p{x: d_Λ(x|_Λ, W) < ε} exacto.

    El número de discrepancias K es Poisson-binomial con probabilidades
    1 - p(W_n); la bola es {K <= K_max}.

    Raises:
        ValueError: Si ε no está en (0, 1)
    """
    _check_open_unit("ε", eps)
    _check_symbols(p, word)
    k_max = strict_radius_count(eps, len(word))
    pmf = poisson_binomial_pmf([1.0 - p[s] for s in word.symbols])
    return min(1.0, math.fsum(pmf[: k_max + 1]))


# ==================== COTAS ====================

def ball_measure_binomial_bound(m: int, eps: float | Fraction, r: float) -> float:
    """
    Cota C(m, ⌊mε⌋)·r^(m-⌊mε⌋) para la medida de una bola con |Λ| = m.

    Args:
        m: Tamaño del soporte (>= 1)
        eps: Radio en (0, 1)
        r: max p(i), en (0, 1)
    """
    if m < 1:
        raise ValueError(f"m debe ser >= 1, recibido: {m}")
    _check_open_unit("ε", eps)
    _check_open_unit("r", r)
    j = math.floor(as_rational(eps) * m)
    if m <= _EXACT_BINOMIAL_LIMIT:
        return math.comb(m, j) * r ** (m - j)
    log_bound = gammaln(m + 1) - gammaln(j + 1) - gammaln(m - j + 1) + (m - j) * math.log(r)
    return float(math.exp(log_bound))


def stirling_ratio(eps: float, r: float) -> float:
    """r(1-ε)^ε / ((1-ε)·ε^ε·r^ε); < 1 cuando ε es suficientemente pequeño."""
    _check_open_unit("ε", eps)
    _check_open_unit("r", r)
    eps = float(eps)
    return r * (1 - eps) ** eps / ((1 - eps) * eps**eps * r**eps)


def stirling_chain_bound(m: int, eps: float, r: float) -> float:
    """Cota intermedia (2πmε(1-ε))^(-1/2) · stirling_ratio(ε, r)^m."""
    if m < 1:
        raise ValueError(f"m debe ser >= 1, recibido: {m}")
    eps = float(eps)
    log_value = m * math.log(stirling_ratio(eps, r)) - 0.5 * math.log(2 * math.pi * m * eps * (1 - eps))
    return math.exp(log_value)


def small_ball_threshold(m: int, eps: float, n: int) -> float:
    """(1-ε)/(n·m): el umbral que una bola debe evitar para refutar AT(n)."""
    return (1 - float(eps)) / (n * m)


def minimal_block_length(eps: float, r: float, n: int, m_max: int) -> Optional[int]:
    """
    Menor m a partir del cual la cota binomial queda bajo (1-ε)/(n·m) hasta m_max.

    Returns:
        int o None si ni siquiera m_max cumple
    """
    if n < 1 or m_max < 1:
        raise ValueError("n y m_max deben ser >= 1")
    primero = None
    for m in range(m_max, 0, -1):
        if ball_measure_binomial_bound(m, eps, r) < small_ball_threshold(m, eps, n):
            primero = m
        else:
            break
    return primero


# ==================== INTERVALOS DE CONFIANZA ====================

def z_value(confidence: float) -> float:
    """Cuantil normal bilateral para el nivel de confianza dado."""
    _check_open_unit("confidence", confidence)
    return float(norm.ppf(0.5 + confidence / 2))


def proportion_half_width(successes: int, samples: int, confidence: float) -> Tuple[float, str]:
    """
    Semiancho de confianza para una proporción.

    Aproximación normal; con p̂ < 10/N_s se usa el extremo superior de
    Wilson (la región de probabilidades pequeñas es la interesante).

    Returns:
        (half_width, method)
    """
    z = z_value(confidence)
    p_hat = successes / samples
    if successes < WILSON_THRESHOLD_COUNT:
        z2 = z * z
        denominador = 1 + z2 / samples
        centro = (p_hat + z2 / (2 * samples)) / denominador
        radio = z * math.sqrt(p_hat * (1 - p_hat) / samples + z2 / (4 * samples**2)) / denominador
        superior = min(1.0, centro + radio)
        return max(0.0, superior - p_hat), "wilson"
    return z * math.sqrt(p_hat * (1 - p_hat) / samples), "normal"


# ==================== ORÁCULOS ====================

class MeasureOracle(ABC):
    """
    Fuente abstracta de probabilidades de cilindros y bolas.

    Attributes:
        k (int): Tamaño del alfabeto
        is_exact (bool): True si las probabilidades son exactas
    """

    k: int
    is_exact: bool = False

    @abstractmethod
    def cylinder_measure(self, word: FunnyWord) -> float:
        """Medida del cilindro fijado por la palabra."""

    @abstractmethod
    def ball_measure(self, word: FunnyWord, eps: float | Fraction,
                     confidence: float = DEFAULT_CONFIDENCE) -> BallEstimate:
        """Medida (o estimación) de la bola abierta de radio ε."""

    @abstractmethod
    def coordinate_marginal(self, index: int) -> np.ndarray:
        """Distribución de x_index sobre el alfabeto."""

    @abstractmethod
    def window_weights(self, start: int, stop: int) -> np.ndarray:
        """
        ν de cada bloque sobre [start, stop], en orden lexicográfico
        (la coordenada start es la más significativa).
        """

    @abstractmethod
    def block_probabilities(self, m: int) -> np.ndarray:
        """Probabilidades (positivas) de los bloques de longitud m."""

    @abstractmethod
    def sample(self, start: int, stop: int, count: int, rng: np.random.Generator) -> np.ndarray:
        """count palabras sobre [start, stop] como matriz (count, stop-start+1)."""

    @abstractmethod
    def describe(self) -> dict:
        """Descripción serializable para los reportes."""

    def contains_window(self, start: int, stop: int) -> bool:
        return True


class BernoulliMeasure(MeasureOracle):
    """
    Medida de Bernoulli μ_p sobre Σ_k.

    Example:
        >>> mu = BernoulliMeasure(ProbabilityVector((0.2, 0.8)))
        >>> round(mu.cylinder_measure(FunnyWord.from_one_based([0, 1, 2], [2, 2, 1], 2)), 3)
        0.128
    """

    is_exact = True

    def __init__(self, p: ProbabilityVector | Sequence[float]):
        self.p = p if isinstance(p, ProbabilityVector) else ProbabilityVector(tuple(p))
        self.k = self.p.k

    def __repr__(self) -> str:
        return f"BernoulliMeasure(p={self.p})"

    def cylinder_measure(self, word: FunnyWord) -> float:
        return cylinder_measure_bernoulli(self.p, word)

    def ball_measure(self, word: FunnyWord, eps: float | Fraction,
                     confidence: float = DEFAULT_CONFIDENCE) -> BallEstimate:
        return BallEstimate(ball_measure_bernoulli_exact(self.p, word, eps))

    def coordinate_marginal(self, index: int) -> np.ndarray:
        return self.p.as_array()

    def window_weights(self, start: int, stop: int) -> np.ndarray:
        return self.block_probabilities(stop - start + 1)

    def block_probabilities(self, m: int) -> np.ndarray:
        _check_budget(self.k, m)
        p = self.p.as_array()
        pesos = p
        for _ in range(m - 1):
            pesos = np.kron(pesos, p)
        return pesos

    def sample(self, start: int, stop: int, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.k, size=(count, stop - start + 1), p=self.p.as_array()).astype(np.uint8)

    def describe(self) -> dict:
        return {"type": "bernoulli", "p": list(self.p.values)}


class EmpiricalMeasure(MeasureOracle):
    """
    Medida empírica: N_s palabras muestreadas sobre una ventana [a, b].

    Hasta RAW_SAMPLE_LIMIT muestras las consultas recorren la matriz cruda;
    por encima se usan mapas de conteo por soporte, con los últimos
    COUNT_CACHE_SUPPORTS soportes consultados en caché.

    Attributes:
        window (Tuple[int, int]): Ventana [a, b]
        samples (np.ndarray): Matriz (N_s, b-a+1) de símbolos 0-based
        k (int): Tamaño del alfabeto
        seed (int | None): Semilla que produjo las muestras
    """

    is_exact = False

    def __init__(self, window: Tuple[int, int], samples: np.ndarray, k: int,
                 seed: Optional[int] = None, source: str = "manual"):
        a, b = int(window[0]), int(window[1])
        if b < a:
            raise ValueError(f"Ventana vacía: [{a}, {b}]")
        if k < 2:
            raise ValueError(f"El alfabeto necesita al menos 2 símbolos, recibido: {k}")
        datos = np.asarray(samples)
        if datos.ndim != 2 or datos.shape[0] < 1:
            raise ValueError("Se necesita una matriz de muestras con al menos una fila")
        if datos.shape[1] != b - a + 1:
            raise ValueError(f"Las muestras tienen {datos.shape[1]} columnas; la ventana [{a}, {b}] pide {b - a + 1}")
        if datos.size and (datos.min() < 0 or datos.max() >= k):
            raise AlphabetError(f"Hay símbolos fuera del alfabeto de tamaño {k}")

        dtype = np.uint8 if k <= 256 else np.int32
        self.window = (a, b)
        self.k = int(k)
        self.seed = seed
        self.source = source
        self._samples = np.ascontiguousarray(datos, dtype=dtype)
        self._samples.setflags(write=False)
        self._count_cache: "OrderedDict[Support, Tuple[np.ndarray, np.ndarray]]" = OrderedDict()
        self._lock = threading.Lock()

    def __repr__(self) -> str:
        return f"EmpiricalMeasure(window={self.window}, k={self.k}, N_s={self.sample_count})"

    # ==================== ACCESO ====================

    @property
    def samples(self) -> np.ndarray:
        return self._samples

    @property
    def sample_count(self) -> int:
        return int(self._samples.shape[0])

    @property
    def window_length(self) -> int:
        return self.window[1] - self.window[0] + 1

    @property
    def uses_count_maps(self) -> bool:
        return self.sample_count > RAW_SAMPLE_LIMIT

    @property
    def cached_supports(self) -> int:
        """Número de mapas de conteo retenidos."""
        return len(self._count_cache)

    def contains_window(self, start: int, stop: int) -> bool:
        return self.window[0] <= start and stop <= self.window[1]

    def _check_support(self, support: Support) -> None:
        if not support.within(*self.window):
            raise SupportOutOfRangeError()

    def restricted(self, support: Support) -> np.ndarray:
        """Columnas de las muestras correspondientes a Λ (N_s × |Λ|)."""
        self._check_support(support)
        return self._samples[:, support.offsets_from(self.window[0])]

    def restricted_counts(self, support: Support) -> Tuple[np.ndarray, np.ndarray]:
        """
        Palabras distintas observadas sobre Λ y sus conteos.

        Solo se conservan los COUNT_CACHE_SUPPORTS soportes usados más
        recientemente; la búsqueda de testigos consulta soportes nuevos
        por cada candidato.

        Returns:
            (rows, counts)
        """
        with self._lock:
            cached = self._count_cache.get(support)
            if cached is not None:
                self._count_cache.move_to_end(support)
                return cached
        rows, counts = np.unique(self.restricted(support), axis=0, return_counts=True)
        entrada = (rows, counts)
        with self._lock:
            self._count_cache[support] = entrada
            self._count_cache.move_to_end(support)
            while len(self._count_cache) > COUNT_CACHE_SUPPORTS:
                self._count_cache.popitem(last=False)
        logger.debug(f"Mapa de conteo para |Λ|={len(support)}: {len(counts)} palabras distintas")
        return entrada

    # ==================== CONTEOS ====================

    def match_count(self, word: FunnyWord, max_mismatches: int, workers: int = 1) -> int:
        """
        Número de muestras x con a lo más max_mismatches discrepancias en Λ.

        El conteo se reparte en bloques fijos de filas; la suma entera no
        depende del número de workers.
        """
        if word.k > self.k:
            raise AlphabetError(f"La palabra usa un alfabeto de {word.k} símbolos; la medida tiene {self.k}")
        objetivo = word.as_array().astype(self._samples.dtype)
        if self.uses_count_maps:
            rows, counts = self.restricted_counts(word.support)
            discrepancias = (rows != objetivo).sum(axis=1)
            return int(counts[discrepancias <= max_mismatches].sum())

        columnas = word.support.offsets_from(self.window[0])
        self._check_support(word.support)

        def contar(rango: Tuple[int, int]) -> int:
            bloque = self._samples[rango[0]:rango[1], columnas]
            return int(((bloque != objetivo).sum(axis=1) <= max_mismatches).sum())

        rangos = [(i, min(i + SAMPLING_BLOCK_SIZE, self.sample_count))
                  for i in range(0, self.sample_count, SAMPLING_BLOCK_SIZE)]
        if workers <= 1 or len(rangos) == 1:
            return sum(contar(r) for r in rangos)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return sum(pool.map(contar, rangos))

    # ==================== INTERFAZ DE ORÁCULO ====================

    def cylinder_measure(self, word: FunnyWord) -> float:
        return self.match_count(word, 0) / self.sample_count

    def ball_measure(self, word: FunnyWord, eps: float | Fraction,
                     confidence: float = DEFAULT_CONFIDENCE) -> BallEstimate:
        return ball_measure_empirical(self, word, eps, confidence)

    def coordinate_marginal(self, index: int) -> np.ndarray:
        if not self.window[0] <= index <= self.window[1]:
            raise SupportOutOfRangeError()
        columna = self._samples[:, index - self.window[0]]
        return np.bincount(columna, minlength=self.k) / self.sample_count

    def encode_window(self, start: int, stop: int) -> np.ndarray:
        """Código entero lexicográfico de cada muestra restringida a [start, stop]."""
        if not self.contains_window(start, stop):
            raise SupportOutOfRangeError()
        length = stop - start + 1
        _check_budget(self.k, length)
        potencias = self.k ** np.arange(length - 1, -1, -1, dtype=np.int64)
        bloque = self._samples[:, start - self.window[0]: stop - self.window[0] + 1]
        return bloque.astype(np.int64) @ potencias

    def window_weights(self, start: int, stop: int) -> np.ndarray:
        codigos = self.encode_window(start, stop)
        length = stop - start + 1
        return np.bincount(codigos, minlength=self.k**length) / self.sample_count

    def block_probabilities(self, m: int) -> np.ndarray:
        if m < 1 or m > self.window_length:
            raise EnumerationBudgetError(
                f"block length exceeds enumeration budget (ventana de longitud {self.window_length}, m={m})"
            )
        support = Support.interval(self.window[0], self.window[0] + m - 1)
        _, counts = self.restricted_counts(support)
        return counts / self.sample_count

    def sample(self, start: int, stop: int, count: int, rng: np.random.Generator) -> np.ndarray:
        if not self.contains_window(start, stop):
            raise SupportOutOfRangeError()
        filas = rng.integers(self.sample_count, size=count)
        return self._samples[filas, start - self.window[0]: stop - self.window[0] + 1]

    def describe(self) -> dict:
        return {
            "type": "empirical",
            "window": list(self.window),
            "k": self.k,
            "samples": self.sample_count,
            "seed": self.seed,
            "source": self.source,
        }


# ==================== EMPÍRICO ====================

def ball_measure_empirical(em: EmpiricalMeasure, word: FunnyWord, eps: float | Fraction,
                           confidence: float = DEFAULT_CONFIDENCE, workers: int = 1) -> BallEstimate:
    """
    Fracción de muestras x con d(x|_Λ, W) < ε y su semiancho de confianza.

    Raises:
        SupportOutOfRangeError: Si Λ no cabe en la ventana de la medida
        ValueError: Si ε o confidence no están en (0, 1)
    """
    _check_open_unit("ε", eps)
    _check_open_unit("confidence", confidence)
    k_max = strict_radius_count(eps, len(word))
    aciertos = em.match_count(word, k_max, workers=workers)
    half_width, metodo = proportion_half_width(aciertos, em.sample_count, confidence)
    return BallEstimate(aciertos / em.sample_count, half_width, em.sample_count, metodo)
