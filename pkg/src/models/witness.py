"""
Modelos de la evidencia numérica contra AT(n)
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from .probability import BallEstimate
from .symbolic import FunnyWord, Support

VERDICT_MET = "condition met"
VERDICT_VIOLATED = "condition violated at this resolution"


def _check_open_unit(name: str, value: float) -> None:
    if not 0 < value < 1:
        raise ValueError(f"{name} debe estar en (0, 1), recibido: {value}")


@dataclass(frozen=True)
class Theorem21Instance:
    """
    Familia (Λ¹, W¹), ..., (Λⁿ, Wⁿ) con radio ε y holgura δ.

    Attributes:
        n (int): Número de pares
        supports (tuple[Support, ...]): Λ¹..Λⁿ
        words (tuple[FunnyWord, ...]): Wⁱ basada en Λⁱ
        eps (float): Radio de las bolas, en (0, 1)
        delta (float): Holgura del umbral 1 - δ, en (0, 1)
    """

    n: int
    supports: Tuple[Support, ...]
    words: Tuple[FunnyWord, ...]
    eps: float
    delta: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n debe ser un entero >= 1, recibido: {self.n!r}")
        supports = tuple(self.supports)
        words = tuple(self.words)
        if len(supports) != self.n or len(words) != self.n:
            raise ValueError(f"Se esperaban {self.n} soportes y {self.n} palabras")
        for i, (support, word) in enumerate(zip(supports, words), start=1):
            if word.support != support:
                raise ValueError(f"La palabra W^{i} no está basada en Λ^{i}")
        _check_open_unit("ε", self.eps)
        _check_open_unit("δ", self.delta)
        object.__setattr__(self, "supports", supports)
        object.__setattr__(self, "words", words)

    @classmethod
    def from_words(cls, words: List[FunnyWord], eps: float, delta: float) -> "Theorem21Instance":
        return cls(len(words), tuple(w.support for w in words), tuple(words), eps, delta)

    @property
    def min_support_size(self) -> int:
        """min |Λⁱ|"""
        return min(len(s) for s in self.supports)

    @property
    def threshold(self) -> float:
        return 1.0 - self.delta

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "eps": self.eps,
            "delta": self.delta,
            "min_support_size": self.min_support_size,
            "words": [w.to_text() for w in self.words],
        }


@dataclass
class WitnessReport:
    """
    Σᵢ |Λⁱ|·ν(B_{ε, Wⁱ, Λⁱ}) frente a 1 - δ.

    Attributes:
        instance (Theorem21Instance): Entradas
        balls (List[BallEstimate]): Medidas de las bolas (con semianchos si son estimadas)
        statistic (float): Σᵢ |Λⁱ| νᵢ
        margin (float): Σᵢ |Λⁱ| semianchoᵢ
        oracle (Dict): Descripción del oráculo
    """

    instance: Theorem21Instance
    balls: List[BallEstimate]
    statistic: float
    margin: float = 0.0
    oracle: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.statistic < 0:
            raise ValueError("El estadístico no puede ser negativo")

    @property
    def threshold(self) -> float:
        return self.instance.threshold

    @property
    def optimistic(self) -> float:
        """Estadístico más la incertidumbre de Monte Carlo."""
        return self.statistic + self.margin

    @property
    def condition_met(self) -> bool:
        return self.optimistic > self.threshold

    @property
    def verdict(self) -> str:
        return VERDICT_MET if self.condition_met else VERDICT_VIOLATED

    def to_dict(self) -> dict:
        return {
            "instance": self.instance.to_dict(),
            "oracle": self.oracle,
            "balls": [b.to_dict() for b in self.balls],
            "statistic": self.statistic,
            "margin": self.margin,
            "optimistic": self.optimistic,
            "threshold": self.threshold,
            "condition_met": self.condition_met,
            "verdict": self.verdict,
        }


@dataclass
class EvidenceReport:
    """
    Mejor WitnessReport encontrado por la búsqueda y su bitácora.

    Attributes:
        best (WitnessReport): Mejor reporte
        evaluated (int): Candidatos evaluados
        search_budget (int): Presupuesto por par (Λⁱ, Wⁱ)
        seed (int): Semilla de la búsqueda
        log (List[Dict]): Mejor candidato por índice i
    """

    best: WitnessReport
    evaluated: int
    search_budget: int
    seed: int
    log: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return self.best.verdict

    def to_dict(self) -> dict:
        return {
            "best": self.best.to_dict(),
            "evaluated": self.evaluated,
            "search_budget": self.search_budget,
            "seed": self.seed,
            "log": self.log,
            "verdict": self.verdict,
        }
