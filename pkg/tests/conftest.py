"""
Fixtures compartidas de las pruebas
"""

import itertools

import numpy as np
import pytest

from src.core.furstenberg import sample_coded_measure
from src.core.measures import BernoulliMeasure
from src.models.probability import ProbabilityVector
from src.models.torus import SkewParams

# Medida codificada de referencia: k=2, ventana 0..9, N_s = 10^6
FURSTENBERG_SAMPLES = 10**6
FURSTENBERG_WINDOW = (0, 9)
FURSTENBERG_SEED = 7


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fair_coin():
    return BernoulliMeasure(ProbabilityVector((0.5, 0.5)))


@pytest.fixture
def biased_coin():
    return BernoulliMeasure(ProbabilityVector((0.2, 0.8)))


@pytest.fixture(scope="session")
def skew_params():
    return SkewParams()


@pytest.fixture(scope="session")
def furstenberg_measure(skew_params):
    return sample_coded_measure(skew_params, FURSTENBERG_WINDOW, FURSTENBERG_SAMPLES, FURSTENBERG_SEED)


def all_words(k: int, length: int):
    """Todas las palabras de longitud length sobre {0..k-1}."""
    return itertools.product(range(k), repeat=length)


def brute_force_ball(p, symbols, k_max):
    """μ_p{x: #discrepancias <= k_max} por enumeración completa."""
    total = 0.0
    for x in all_words(len(p), len(symbols)):
        discrepancias = sum(1 for a, b in zip(x, symbols) if a != b)
        if discrepancias <= k_max:
            total += float(np.prod([p[s] for s in x]))
    return total


def brute_force_mismatch_masses(p, symbols):
    """Masa μ_p de cada número de discrepancias con symbols, enumerando las k^m palabras con numpy."""
    k, m = len(p), len(symbols)
    palabras = np.indices((k,) * m, dtype=np.int8).reshape(m, -1).T
    pesos = np.prod(np.asarray(p, dtype=float)[palabras], axis=1)
    discrepancias = (palabras != np.asarray(symbols, dtype=np.int8)).sum(axis=1)
    return np.bincount(discrepancias, weights=pesos, minlength=m + 1)
