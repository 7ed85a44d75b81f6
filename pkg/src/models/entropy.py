"""
Perfil de entropía por bloques
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional


@dataclass(frozen=True)
class EntropyRow:
    """
    Entropía del bloque de longitud m (en nats).

    Attributes:
        m (int): Longitud del bloque
        block_entropy (float): H_m
        increment (float): H_m - H_{m-1}
        distinct_blocks (int): Bloques con probabilidad positiva
        samples (int | None): N_s para oráculos empíricos
    """

    m: int
    block_entropy: float
    increment: float
    distinct_blocks: int
    samples: Optional[int] = None

    @property
    def rate(self) -> float:
        """H_m / m"""
        return self.block_entropy / self.m

    @property
    def miller_madow(self) -> float:
        """H_m + (distintos - 1) / (2 N_s); igual a H_m si el oráculo es exacto."""
        if self.samples is None:
            return self.block_entropy
        return self.block_entropy + (self.distinct_blocks - 1) / (2 * self.samples)

    @property
    def block_entropy_bits(self) -> float:
        return self.block_entropy / math.log(2)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "H_m": self.block_entropy,
            "H_m/m": self.rate,
            "increment": self.increment,
            "distinct_blocks": self.distinct_blocks,
            "samples": self.samples,
            "H_m_miller_madow": self.miller_madow,
            "H_m_bits": self.block_entropy_bits,
        }


@dataclass
class EntropyProfile:
    """
    Perfil H_1, ..., H_{m_max} de un oráculo.

    Attributes:
        rows (List[EntropyRow]): Una fila por longitud de bloque
        exact (bool): True si viene de un oráculo exacto
        bias_note (str | None): Advertencia de sesgo por submuestreo
    """

    rows: List[EntropyRow] = field(default_factory=list)
    exact: bool = True
    bias_note: Optional[str] = None

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rates(self) -> List[float]:
        return [row.rate for row in self.rows]

    @property
    def block_entropies(self) -> List[float]:
        return [row.block_entropy for row in self.rows]

    @property
    def increments(self) -> List[float]:
        return [row.increment for row in self.rows]

    def to_dict(self) -> dict:
        return {
            "exact": self.exact,
            "bias_note": self.bias_note,
            "rows": [row.to_dict() for row in self.rows],
        }
