"""
Estadístico de la condición necesaria para AT(n) y búsqueda de evidencia

Para palabras W¹..Wⁿ sobre soportes Λ¹..Λⁿ calcula
    Σᵢ |Λⁱ|·ν(B_{ε, Wⁱ, Λⁱ})
y lo compara con 1 - δ. Si ni la mejor familia encontrada supera el
umbral (con el margen de Monte Carlo), el reporte dice "condition
violated at this resolution": evidencia, no prueba.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..models.probability import BallEstimate
from ..models.symbolic import FunnyWord, Support
from ..models.witness import EvidenceReport, Theorem21Instance, WitnessReport
from ..utils.constants import DEFAULT_CONFIDENCE
from ..utils.rng import derive_seed, make_rng
from .measures import (
    BernoulliMeasure,
    EmpiricalMeasure,
    MeasureOracle,
    ball_measure_bernoulli_exact,
    ball_measure_empirical,
    proportion_half_width,
)
from .symbolic_core import strict_radius_count

logger = logging.getLogger(__name__)


def _ball(oracle: MeasureOracle, word: FunnyWord, eps: float, confidence: float, workers: int) -> BallEstimate:
    if isinstance(oracle, EmpiricalMeasure):
        return ball_measure_empirical(oracle, word, eps, confidence, workers=workers)
    return oracle.ball_measure(word, eps, confidence)


def theorem21_statistic(inst: Theorem21Instance, oracle: MeasureOracle,
                        confidence: float = DEFAULT_CONFIDENCE, workers: int = 1) -> WitnessReport:
    """
    Σᵢ |Λⁱ|·ν(B_{ε, Wⁱ, Λⁱ}) con medidas exactas (Bernoulli) o estimadas.

    Raises:
        SupportOutOfRangeError: Si algún Λⁱ no cabe en la ventana del oráculo
    """
    bolas = [_ball(oracle, w, inst.eps, confidence, workers) for w in inst.words]
    estadistico = sum(len(w) * b.estimate for w, b in zip(inst.words, bolas))
    margen = sum(len(w) * b.half_width for w, b in zip(inst.words, bolas))
    reporte = WitnessReport(inst, bolas, float(estadistico), float(margen), oracle.describe())
    logger.info(f"📊 Σ|Λⁱ|ν = {reporte.statistic:.6g} (+{reporte.margin:.2g}) vs {reporte.threshold:.4g}: "
                f"{reporte.verdict}")
    return reporte


def greedy_funny_word(oracle: MeasureOracle, support: Support) -> FunnyWord:
    """
    En cada j ∈ Λ el símbolo más probable de ν(x_j = ·); empates al menor.
    """
    simbolos = tuple(int(np.argmax(oracle.coordinate_marginal(j))) for j in support)
    return FunnyWord(support, simbolos, oracle.k)


# ==================== PUNTUACIÓN ====================

class _Scorer:
    """
    Puntaje |Λ|·ν(bola) de palabras sobre un soporte fijo.

    Para medidas empíricas el puntaje es |Λ|·(estimación - semiancho) y
    los cambios de una coordenada se evalúan con conteos incrementales.
    """

    def __init__(self, oracle: MeasureOracle, support: Support, eps: float, confidence: float):
        self.oracle = oracle
        self.support = support
        self.eps = eps
        self.confidence = confidence
        self.size = len(support)
        self.k_max = strict_radius_count(eps, self.size)
        self.empirical = isinstance(oracle, EmpiricalMeasure)
        if self.empirical:
            if oracle.uses_count_maps:
                self.rows, self.counts = oracle.restricted_counts(support)
            else:
                self.rows = oracle.restricted(support)
                self.counts = np.ones(self.rows.shape[0], dtype=np.int64)

    def _from_mismatches(self, mismatches: np.ndarray) -> float:
        aciertos = int(self.counts[mismatches <= self.k_max].sum())
        total = self.oracle.sample_count
        half_width, _ = proportion_half_width(aciertos, total, self.confidence)
        return self.size * (aciertos / total - half_width)

    def mismatches(self, symbols: np.ndarray) -> np.ndarray:
        return (self.rows != symbols.astype(self.rows.dtype)).sum(axis=1)

    def score(self, symbols: np.ndarray) -> float:
        if self.empirical:
            return self._from_mismatches(self.mismatches(symbols))
        palabra = FunnyWord(self.support, tuple(int(s) for s in symbols), self.oracle.k)
        if isinstance(self.oracle, BernoulliMeasure):
            return self.size * ball_measure_bernoulli_exact(self.oracle.p, palabra, self.eps)
        bola = self.oracle.ball_measure(palabra, self.eps, self.confidence)
        return self.size * (bola.estimate - bola.half_width)

    def climb(self, symbols: np.ndarray, budget: int) -> Tuple[np.ndarray, float, int]:
        """
        Escalada por cambios de una coordenada; solo acepta mejoras estrictas.

        Returns:
            (símbolos, puntaje, evaluaciones)
        """
        actual = symbols.copy()
        mejor = self.score(actual)
        discrepancias = self.mismatches(actual) if self.empirical else None
        evaluaciones = 0
        mejoro = True
        while mejoro and evaluaciones < budget:
            mejoro = False
            for j in range(self.size):
                for nuevo in range(self.oracle.k):
                    if nuevo == actual[j] or evaluaciones >= budget:
                        continue
                    evaluaciones += 1
                    if self.empirical:
                        columna = self.rows[:, j]
                        candidato_d = discrepancias - (columna != actual[j]) + (columna != nuevo)
                        puntaje = self._from_mismatches(candidato_d)
                    else:
                        candidato = actual.copy()
                        candidato[j] = nuevo
                        puntaje = self.score(candidato)
                    if puntaje > mejor:
                        mejor = puntaje
                        actual[j] = nuevo
                        if self.empirical:
                            discrepancias = candidato_d
                        mejoro = True
        return actual, mejor, evaluaciones


# ==================== BÚSQUEDA ====================

def _default_window(oracle: MeasureOracle, sizes: Sequence[int]) -> Tuple[int, int]:
    if isinstance(oracle, EmpiricalMeasure):
        return oracle.window
    return (0, 2 * max(sizes) - 1)


def _candidates(oracle: MeasureOracle, size: int, window: Tuple[int, int], budget: int,
                rng: np.random.Generator) -> List[Tuple[Support, np.ndarray]]:
    """
    Candidato 0: soporte contiguo al inicio con la palabra voraz. Luego se
    alternan soportes contiguos y aleatorios, con palabras voraces o aleatorias.
    """
    inicio, fin = window
    huecos = fin - inicio + 1 - size
    candidatos = []
    for c in range(budget):
        if c == 0:
            soporte = Support.interval(inicio, inicio + size - 1)
        elif c % 2 == 1:
            desde = inicio + int(rng.integers(huecos + 1))
            soporte = Support.interval(desde, desde + size - 1)
        else:
            indices = rng.choice(fin - inicio + 1, size=size, replace=False) + inicio
            soporte = Support.from_iterable(indices.tolist())
        if c % 3 == 0:
            simbolos = np.asarray(greedy_funny_word(oracle, soporte).symbols, dtype=np.int64)
        else:
            simbolos = rng.integers(oracle.k, size=size)
        candidatos.append((soporte, simbolos))
    return candidatos


def non_atn_evidence(oracle: MeasureOracle, n: int, eps: float, delta: float,
                     support_sizes: int | Sequence[int], search_budget: int, seed: int = 0,
                     window: Optional[Tuple[int, int]] = None, confidence: float = DEFAULT_CONFIDENCE,
                     workers: int = 1) -> EvidenceReport:
    """
    Maximiza Σᵢ |Λⁱ|·ν(B_{ε, Wⁱ, Λⁱ}) sobre soportes y palabras candidatas.

    El estadístico se separa por i, así que cada par se optimiza por su
    cuenta: search_budget candidatos evaluados (en paralelo, reducción por
    (puntaje, índice)) y luego escalada por coordenadas desde el mejor.

    Raises:
        ValueError: Si el presupuesto es < 1 o los tamaños no caben en la ventana
    """
    if search_budget < 1:
        raise ValueError(f"search_budget debe ser >= 1, recibido: {search_budget}")
    if isinstance(support_sizes, int):
        tamanos = [support_sizes] * n
    else:
        tamanos = [int(s) for s in support_sizes]
    if len(tamanos) != n or min(tamanos) < 1:
        raise ValueError(f"Se esperaban {n} tamaños de soporte positivos, recibido: {tamanos}")
    window = window or _default_window(oracle, tamanos)
    if max(tamanos) > window[1] - window[0] + 1:
        raise ValueError(f"Los soportes de tamaño {max(tamanos)} no caben en la ventana {window}")

    palabras: List[FunnyWord] = []
    bitacora = []
    evaluados = 0
    for i, tamano in enumerate(tamanos, start=1):
        rng = make_rng(derive_seed(seed, f"evidence-{i}"))
        candidatos = _candidates(oracle, tamano, window, search_budget, rng)

        def puntuar(candidato: Tuple[Support, np.ndarray]) -> float:
            soporte, simbolos = candidato
            return _Scorer(oracle, soporte, eps, confidence).score(simbolos)

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                puntajes = list(pool.map(puntuar, candidatos))
        else:
            puntajes = [puntuar(c) for c in candidatos]
        indice = max(range(len(candidatos)), key=lambda c: (puntajes[c], -c))
        soporte, simbolos = candidatos[indice]

        simbolos, puntaje, pasos = _Scorer(oracle, soporte, eps, confidence).climb(simbolos, search_budget)
        evaluados += len(candidatos) + pasos
        palabra = FunnyWord(soporte, tuple(int(s) for s in simbolos), oracle.k)
        palabras.append(palabra)
        bitacora.append({
            "i": i,
            "candidate": indice,
            "initial_score": puntajes[indice],
            "score": puntaje,
            "climb_evaluations": pasos,
            "word": palabra.to_text(),
        })
        logger.debug(f"Par {i}: candidato {indice}, puntaje {puntajes[indice]:.4g} → {puntaje:.4g}")

    instancia = Theorem21Instance.from_words(palabras, eps, delta)
    mejor = theorem21_statistic(instancia, oracle, confidence, workers)
    logger.info(f"✅ Búsqueda terminada: {evaluados} evaluaciones, {mejor.verdict}")
    return EvidenceReport(mejor, evaluados, search_budget, seed, bitacora)
