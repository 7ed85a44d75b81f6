"""
Semillas reproducibles

Toda la aleatoriedad sale de una semilla de nivel superior. Regla de
división documentada:

- sub-semilla con nombre: SeedSequence([seed, crc32(label)])
- bloque de muestreo b:   SeedSequence([seed, b])

Los bloques tienen tamaño fijo, así que el resultado no depende del
número de workers.
"""

import zlib
from typing import Iterator, Tuple

import numpy as np

from .constants import SAMPLING_BLOCK_SIZE


def _label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def derive_seed(seed: int, label: str) -> int:
    """
    Deriva una sub-semilla entera a partir de la semilla global.

    Args:
        seed: Semilla de nivel superior
        label: Nombre estable del consumidor (ej: "markov.base_word")

    Returns:
        int: Sub-semilla de 63 bits
    """
    sequence = np.random.SeedSequence([int(seed), _label_key(label)])
    return int(sequence.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_rng(seed: int, label: str | None = None) -> np.random.Generator:
    """Generator de numpy para la semilla (y etiqueta opcional)."""
    if label is None:
        return np.random.default_rng(np.random.SeedSequence([int(seed)]))
    return np.random.default_rng(np.random.SeedSequence([int(seed), _label_key(label)]))


def block_rng(seed: int, block_index: int) -> np.random.Generator:
    """Corriente aleatoria del bloque de muestreo block_index."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(block_index)]))


def sample_blocks(total: int, block_size: int = SAMPLING_BLOCK_SIZE) -> Iterator[Tuple[int, int, int]]:
    """
    Parte el rango [0, total) en bloques de tamaño fijo.

    Yields:
        (block_index, start, stop)
    """
    for block_index, start in enumerate(range(0, total, block_size)):
        yield block_index, start, min(start + block_size, total)
