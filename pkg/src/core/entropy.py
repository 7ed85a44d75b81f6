"""
Entropía por bloques

Estimadores de entropía de bloques y de la tasa H_m/m sobre cualquier
MeasureOracle, más la entropía exacta de una medida de Bernoulli.
Logaritmo natural en todo el módulo; los reportes agregan bits.
"""

import csv
import io
import logging
from pathlib import Path
from typing import Optional, TextIO

import numpy as np
from scipy.special import entr

from ..models.entropy import EntropyProfile, EntropyRow
from ..models.probability import ProbabilityVector
from ..utils.constants import CSV_ENTROPY_COLUMNS
from ..utils.file_utils import ensure_parent_dir
from .measures import EmpiricalMeasure, MeasureOracle

logger = logging.getLogger(__name__)


def shannon_entropy(probabilities: np.ndarray) -> float:
    """-Σ q ln q con 0·ln 0 = 0."""
    return float(entr(np.asarray(probabilities, dtype=np.float64)).sum())


def block_entropy(oracle: MeasureOracle, m: int) -> float:
    """
    H_m = -Σ_b ν(b) ln ν(b) sobre los bloques de longitud m.

    Raises:
        EnumerationBudgetError: Si k^m excede el presupuesto (oráculos exactos)
            o m excede la ventana (oráculos empíricos)
    """
    return shannon_entropy(oracle.block_probabilities(m))


def bernoulli_entropy_exact(p: ProbabilityVector) -> float:
    """-Σ p(i) ln p(i) (convención no negativa)."""
    return shannon_entropy(p.as_array())


def entropy_profile(oracle: MeasureOracle, m_max: int) -> EntropyProfile:
    """
    Perfil de entropía para m = 1..m_max.

    Para oráculos empíricos agrega una nota de sesgo cuando el número de
    bloques distintos se acerca a N_s.
    """
    if m_max < 1:
        raise ValueError(f"m_max debe ser >= 1, recibido: {m_max}")
    muestras = oracle.sample_count if isinstance(oracle, EmpiricalMeasure) else None

    profile = EntropyProfile(exact=oracle.is_exact)
    anterior = 0.0
    for m in range(1, m_max + 1):
        probabilidades = oracle.block_probabilities(m)
        h = shannon_entropy(probabilidades)
        distintos = int(np.count_nonzero(probabilidades))
        profile.rows.append(EntropyRow(m, h, h - anterior, distintos, muestras))
        anterior = h
        logger.debug(f"H_{m} = {h:.6f} nats ({distintos} bloques)")

    if muestras is not None:
        ultimo = profile.rows[-1]
        profile.bias_note = (
            f"{ultimo.distinct_blocks} bloques distintos observados con N_s={muestras} en m={m_max}; "
            f"los valores crudos subestiman H_m cuando ese cociente crece"
        )
    logger.info(f"📊 Perfil de entropía: H_{m_max}/{m_max} = {profile.rows[-1].rate:.6f} nats")
    return profile


def write_profile_csv(profile: EntropyProfile, target: Optional[str | Path | TextIO] = None) -> str:
    """
    Escribe el perfil como CSV (columnas en CSV_ENTROPY_COLUMNS).

    Args:
        profile: Perfil calculado
        target: Ruta, stream abierto o None (solo devuelve el texto)

    Returns:
        str: Contenido CSV
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_ENTROPY_COLUMNS)
    for row in profile.rows:
        writer.writerow([
            row.m,
            repr(row.block_entropy),
            repr(row.rate),
            repr(row.increment),
            row.distinct_blocks,
            "" if row.samples is None else row.samples,
            repr(row.miller_madow),
            repr(row.block_entropy_bits),
        ])
    texto = buffer.getvalue()
    if isinstance(target, (str, Path)):
        ruta = ensure_parent_dir(target)
        with open(ruta, "w", encoding="utf-8", newline="") as f:
            f.write(texto)
        logger.info(f"📂 CSV de entropía guardado: {ruta}")
    elif target is not None:
        target.write(texto)
    return texto
