"""
Modelos probabilísticos: vectores de probabilidad y estimaciones de bolas
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class ProbabilityVector:
    """
    Vector de probabilidad p = (p(1), ..., p(k)) con entradas positivas.

    Las entradas se renormalizan al construir, así que (1, 4) se guarda
    como (0.2, 0.8).

    Attributes:
        values (Tuple[float, ...]): Probabilidades, todas > 0, suma 1
    """

    values: Tuple[float, ...]

    def __post_init__(self):
        valores = tuple(float(v) for v in self.values)
        if len(valores) < 2:
            raise ValueError(f"Se necesitan al menos 2 probabilidades, recibidas: {len(valores)}")
        for v in valores:
            if not math.isfinite(v) or v <= 0:
                raise ValueError(f"Todas las probabilidades deben ser positivas y finitas: {valores}")
        total = math.fsum(valores)
        object.__setattr__(self, "values", tuple(v / total for v in valores))

    @classmethod
    def uniform(cls, k: int) -> "ProbabilityVector":
        return cls(tuple([1.0] * k))

    @classmethod
    def parse(cls, text: str) -> "ProbabilityVector":
        """Lee "0.2,0.8" (o "1,4", que se renormaliza)."""
        try:
            return cls(tuple(float(item) for item in text.split(",")))
        except ValueError as e:
            raise ValueError(f"Vector de probabilidad inválido: {text!r} ({e})") from e

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, symbol: int) -> float:
        return self.values[symbol]

    @property
    def k(self) -> int:
        return len(self.values)

    @property
    def max(self) -> float:
        """r = max p(i)"""
        return max(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)

    def __str__(self) -> str:
        return "(" + ", ".join(f"{v:.6g}" for v in self.values) + ")"


@dataclass(frozen=True)
class BallEstimate:
    """
    Medida de una bola de Hamming, exacta o estimada.

    Attributes:
        estimate (float): Valor (exacto o fracción muestral)
        half_width (float): Semiancho del intervalo de confianza (0 si es exacto)
        samples (int | None): N_s si es estimado
        method (str): 'exact', 'normal' o 'wilson'
    """

    estimate: float
    half_width: float = 0.0
    samples: int | None = None
    method: str = "exact"

    @property
    def is_exact(self) -> bool:
        return self.method == "exact"

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "half_width": self.half_width,
            "samples": self.samples,
            "method": self.method,
        }
