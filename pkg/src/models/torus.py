"""
Modelos del producto sesgado de Furstenberg sobre el 2-toro
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Tuple

from ..utils.constants import DEFAULT_SKEW_K, GOLDEN_ALPHA
from .symbolic import FunnyWord, Support

# Denominador hasta el cual un α se considera racional
_RATIONAL_PROBE_DENOMINATOR = 10**4
_RATIONAL_PROBE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TorusPoint:
    """
    Punto (s, t) del 2-toro, ambas coordenadas reducidas módulo 1.
    """

    s: float
    t: float

    def __post_init__(self):
        for nombre in ("s", "t"):
            valor = float(getattr(self, nombre))
            if not math.isfinite(valor):
                raise ValueError(f"La coordenada {nombre} debe ser finita, recibido: {valor}")
            valor = valor % 1.0
            if valor >= 1.0:
                valor = 0.0
            object.__setattr__(self, nombre, valor)

    def as_tuple(self) -> Tuple[float, float]:
        return (self.s, self.t)


@dataclass(frozen=True)
class SkewParams:
    """
    Parámetros de T(s, t) = (s + α, 2s + t + α) y de la partición en k+1 franjas.

    Attributes:
        alpha (float): Rotación α en (0, 1), irracional
        k (int): El alfabeto codificado es {1, ..., k+1} (k >= 2)
        allow_rational (bool): Solo para pruebas; admite α racional (incluido 0)
    """

    alpha: float = GOLDEN_ALPHA
    k: int = DEFAULT_SKEW_K
    allow_rational: bool = False

    def __post_init__(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 2:
            raise ValueError(f"k debe ser un entero >= 2, recibido: {self.k!r}")
        alpha = float(self.alpha)
        if self.allow_rational:
            if not 0 <= alpha < 1:
                raise ValueError(f"α debe estar en [0, 1), recibido: {alpha}")
        else:
            if not 0 < alpha < 1:
                raise ValueError(f"α debe estar en (0, 1), recibido: {alpha}")
            aproximacion = Fraction(alpha).limit_denominator(_RATIONAL_PROBE_DENOMINATOR)
            if abs(alpha - float(aproximacion)) < _RATIONAL_PROBE_TOLERANCE:
                raise ValueError(
                    f"α = {alpha} es racional ({aproximacion}) dentro de la precisión; "
                    f"usa allow_rational solo en pruebas"
                )
        object.__setattr__(self, "alpha", alpha)

    @property
    def symbols(self) -> int:
        """Tamaño del alfabeto codificado, k+1."""
        return self.k + 1

    @property
    def strip_width(self) -> float:
        return 1.0 / (self.k + 1)

    @property
    def ball_radius(self) -> Fraction:
        """Radio 1/(4k+4) de la bola B_{1/(4k+4), x, Λ}."""
        return Fraction(1, 4 * self.k + 4)

    @property
    def ineq3_threshold(self) -> float:
        """1 - 1/(4k²+4k+1)"""
        return 1.0 - 1.0 / (4 * self.k**2 + 4 * self.k + 1)

    @property
    def tail_level(self) -> Fraction:
        """(2k+1)/(2k+2): nivel relativo de la cola de |S|."""
        return Fraction(2 * self.k + 1, 2 * self.k + 2)

    def markov_bound(self, n: int) -> float:
        """((2k+2)²/(2k+1)²) · 1/n"""
        return (2 * self.k + 2) ** 2 / ((2 * self.k + 1) ** 2 * n)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "k": self.k}


@dataclass(frozen=True)
class CharacterSum:
    """
    Suma de caracteres S = Σ_i a_i ε^(i-1), ε = exp(2πi/(k+1)).

    Attributes:
        base (FunnyWord): Palabra de referencia x
        support (Support): Λ
        value (complex): S
        counts (Tuple[int, ...]): a_1, ..., a_{k+1}
    """

    base: FunnyWord
    support: Support
    value: complex
    counts: Tuple[int, ...]

    def __post_init__(self):
        if sum(self.counts) != len(self.support):
            raise ValueError("Los conteos a_i deben sumar |Λ|")
        if abs(self.value) > len(self.support) + 1e-9:
            raise ValueError("|S| no puede exceder |Λ|")

    @property
    def modulus(self) -> float:
        return abs(self.value)

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_text(),
            "value": self.value,
            "modulus": self.modulus,
            "counts": list(self.counts),
        }


@dataclass
class CheckReport:
    """
    Resultado de una verificación Monte Carlo.

    Attributes:
        name (str): Nombre de la verificación
        statistic (float): Valor observado
        bound (float): Cota o valor esperado
        sigma (float): Error estándar del estadístico
        passed (bool): Veredicto
        details (Dict): Datos adicionales (entradas, semillas, tablas)
    """

    name: str
    statistic: float
    bound: float
    sigma: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "bound": self.bound,
            "sigma": self.sigma,
            "pass": self.passed,
            "details": self.details,
        }

    def __str__(self) -> str:
        estado = "✅" if self.passed else "❌"
        return f"{estado} {self.name}: {self.statistic:.6g} vs {self.bound:.6g} (σ={self.sigma:.3g})"
