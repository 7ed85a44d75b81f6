"""
Modelos del resolvedor AT(n)

StepFunction representa una función cilíndrica no negativa sobre una
ventana de coordenadas; AtnProblem y AtnWitness describen una instancia
de la aproximación por combinaciones no negativas de trasladados de n
generadores y la solución encontrada.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.errors import WindowMismatchError
from ..utils.constants import (
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_RESTARTS,
    DEFAULT_STOP_TOLERANCE,
    LP_BACKENDS,
)

# Valores negativos más pequeños que esto se leen como cero de redondeo
_NEGATIVE_TOLERANCE = 1e-12


@dataclass
class StepFunction:
    """
    Función escalón no negativa que depende de las coordenadas [a, b].

    Los valores están en orden lexicográfico de bloques (la coordenada a
    es la más significativa); weights guarda ν de cada bloque.

    Attributes:
        window (Tuple[int, int]): Ventana [a, b]
        k (int): Tamaño del alfabeto
        values (np.ndarray): Un valor por bloque (k^L)
        weights (np.ndarray): ν(bloque) (k^L), suman 1

    Example:
        >>> pesos = np.full(4, 0.25)
        >>> f = StepFunction((0, 1), 2, np.array([1.0, 0.0, 0.0, 1.0]), pesos)
        >>> f.norm
        0.5
    """

    window: Tuple[int, int]
    k: int
    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        a, b = int(self.window[0]), int(self.window[1])
        if b < a:
            raise ValueError(f"Ventana vacía: [{a}, {b}]")
        if self.k < 2:
            raise ValueError(f"El alfabeto necesita al menos 2 símbolos, recibido: {self.k}")
        bloques = self.k ** (b - a + 1)
        valores = np.asarray(self.values, dtype=np.float64).reshape(-1)
        pesos = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if valores.shape[0] != bloques or pesos.shape[0] != bloques:
            raise ValueError(f"Se esperaban {bloques} valores y pesos para la ventana [{a}, {b}]")
        if valores.size and valores.min() < -_NEGATIVE_TOLERANCE:
            raise ValueError("Los valores de una StepFunction deben ser >= 0")
        if pesos.min() < 0 or abs(pesos.sum() - 1.0) > 1e-9:
            raise ValueError("Los pesos deben ser una distribución de probabilidad")
        self.window = (a, b)
        self.values = np.maximum(valores, 0.0)
        self.weights = pesos

    # ==================== CONSTRUCTORES ====================

    @classmethod
    def constant(cls, window: Tuple[int, int], k: int, weights: np.ndarray, value: float = 1.0) -> "StepFunction":
        return cls(window, k, np.full(len(weights), float(value)), weights)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepFunction":
        """
        Reconstruye desde el formato de to_dict.

        Raises:
            ValueError: Si faltan campos obligatorios
        """
        for campo in ("window", "k", "values", "weights"):
            if campo not in data:
                raise ValueError(f"StepFunction requiere campo '{campo}'")
        return cls(tuple(data["window"]), int(data["k"]), np.asarray(data["values"]), np.asarray(data["weights"]))

    # ==================== PROPIEDADES ====================

    @property
    def length(self) -> int:
        return self.window[1] - self.window[0] + 1

    @property
    def norm(self) -> float:
        """‖f‖₁ = Σ_b f(b)·ν(b)"""
        return float(self.values @ self.weights)

    def is_compatible(self, other: "StepFunction") -> bool:
        return (
            self.window == other.window
            and self.k == other.k
            and np.allclose(self.weights, other.weights, rtol=0, atol=1e-12)
        )

    def check_compatible(self, other: "StepFunction") -> None:
        if not self.is_compatible(other):
            raise WindowMismatchError(
                f"Ventanas o pesos distintos: {self.window} (k={self.k}) vs {other.window} (k={other.k})"
            )

    def with_values(self, values: np.ndarray) -> "StepFunction":
        return StepFunction(self.window, self.k, values, self.weights)

    def scaled(self, factor: float) -> "StepFunction":
        return self.with_values(self.values * float(factor))

    def normalized(self) -> "StepFunction":
        """Copia con ‖f‖₁ = 1."""
        norma = self.norm
        if norma <= 0:
            raise ValueError("No se puede normalizar una función de norma cero")
        return self.scaled(1.0 / norma)

    def to_dict(self) -> dict:
        return {
            "window": list(self.window),
            "k": self.k,
            "values": self.values.tolist(),
            "weights": self.weights.tolist(),
            "norm": self.norm,
        }


@dataclass(frozen=True)
class SolverParams:
    """
    Parámetros de resolución compartidos por todas las n de un perfil.

    Attributes:
        shifts (Tuple[int, ...]): Conjunto finito 𝒯, simétrico alrededor de 0
        generator_window (Tuple[int, int] | None): Ventana de los g_m (None = la de los objetivos)
        max_iterations (int): Presupuesto de iteraciones alternadas
        tolerance (float): ε_stop
        mass_normalized (bool): Exige Σ α_i = ‖f_i‖
        lp_backend (str): 'simplex' (denso, Bland) o 'highs' (scipy)
        restarts (int): Reinicios aleatorios además de las siembras deterministas
        workers (int): Hilos para reinicios independientes
    """

    shifts: Tuple[int, ...] = (0,)
    generator_window: Optional[Tuple[int, int]] = None
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    tolerance: float = DEFAULT_STOP_TOLERANCE
    mass_normalized: bool = False
    lp_backend: str = "simplex"
    restarts: int = DEFAULT_RESTARTS
    workers: int = 1

    def __post_init__(self):
        shifts = tuple(sorted({int(t) for t in self.shifts}))
        if not shifts:
            raise ValueError("El conjunto de traslaciones 𝒯 no puede estar vacío")
        if set(shifts) != {-t for t in shifts}:
            raise ValueError(f"𝒯 debe ser simétrico alrededor de 0, recibido: {shifts}")
        object.__setattr__(self, "shifts", shifts)
        if self.generator_window is not None:
            a, b = int(self.generator_window[0]), int(self.generator_window[1])
            if b < a:
                raise ValueError(f"Ventana de generadores vacía: [{a}, {b}]")
            object.__setattr__(self, "generator_window", (a, b))
        if self.max_iterations < 0:
            raise ValueError(f"max_iterations debe ser >= 0, recibido: {self.max_iterations}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance debe ser >= 0, recibido: {self.tolerance}")
        if self.lp_backend not in LP_BACKENDS:
            raise ValueError(f"Backend de LP desconocido: {self.lp_backend!r} (opciones: {LP_BACKENDS})")
        if self.restarts < 0:
            raise ValueError(f"restarts debe ser >= 0, recibido: {self.restarts}")
        if self.workers < 1:
            raise ValueError(f"workers debe ser >= 1, recibido: {self.workers}")

    def to_dict(self) -> dict:
        return {
            "shifts": list(self.shifts),
            "generator_window": list(self.generator_window) if self.generator_window else None,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
            "mass_normalized": self.mass_normalized,
            "lp_backend": self.lp_backend,
            "restarts": self.restarts,
        }


@dataclass
class AtnProblem:
    """
    Instancia AT(n) a resolución finita.

    Attributes:
        oracle: MeasureOracle que da los pesos de los bloques
        targets (List[StepFunction]): f_1, ..., f_K sobre una ventana común
        n (int): Número de generadores
        params (SolverParams): 𝒯, ventana de generadores, presupuestos
    """

    oracle: Any
    targets: List[StepFunction]
    n: int
    params: SolverParams = field(default_factory=SolverParams)

    def __post_init__(self):
        if not self.targets:
            raise ValueError("Se necesita al menos una función objetivo (K >= 1)")
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n debe ser un entero >= 1, recibido: {self.n!r}")
        primera = self.targets[0]
        for f in self.targets[1:]:
            primera.check_compatible(f)
        if primera.k != self.oracle.k:
            raise WindowMismatchError(f"Los objetivos usan k={primera.k}; el oráculo tiene k={self.oracle.k}")
        a, b = self.generator_window
        for t in self.params.shifts:
            if not self.oracle.contains_window(min(a - t, self.window[0]), max(b - t, self.window[1])):
                raise WindowMismatchError(f"La traslación t={t} sale de la ventana del oráculo")

    @property
    def window(self) -> Tuple[int, int]:
        return self.targets[0].window

    @property
    def k(self) -> int:
        return self.targets[0].k

    @property
    def shifts(self) -> Tuple[int, ...]:
        return self.params.shifts

    @property
    def generator_window(self) -> Tuple[int, int]:
        return self.params.generator_window or self.window

    @property
    def target_count(self) -> int:
        return len(self.targets)

    def to_dict(self) -> dict:
        return {
            "oracle": self.oracle.describe(),
            "n": self.n,
            "window": list(self.window),
            "generator_window": list(self.generator_window),
            "targets": [f.to_dict() for f in self.targets],
            "params": self.params.to_dict(),
        }


@dataclass
class AtnWitness:
    """
    Solución encontrada: generadores, coeficientes y errores.

    Attributes:
        generators (List[StepFunction]): g_1, ..., g_n (‖g_m‖₁ = 1)
        coefficients (np.ndarray): α[i, m, j] >= 0 para el objetivo i, generador m y traslación t_j
        errors (np.ndarray): e_i por objetivo
        shifts (Tuple[int, ...]): 𝒯 en el orden de la última dimensión de α
        trace (List[float]): e* tras cada iteración (no creciente)
        iterations (int): Iteraciones alternadas realizadas
        start (str): Siembra que produjo la solución
    """

    generators: List[StepFunction]
    coefficients: np.ndarray
    errors: np.ndarray
    shifts: Tuple[int, ...]
    trace: List[float] = field(default_factory=list)
    iterations: int = 0
    start: str = "targets"

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64)
        self.errors = np.asarray(self.errors, dtype=np.float64)
        if self.coefficients.ndim != 3:
            raise ValueError("coefficients debe tener forma (K, n, |𝒯|)")
        if self.coefficients.size and self.coefficients.min() < -1e-9:
            raise ValueError("Los coeficientes α deben ser >= 0")
        self.coefficients = np.maximum(self.coefficients, 0.0)

    @property
    def max_error(self) -> float:
        """e* = max_i e_i"""
        return float(self.errors.max())

    @property
    def mean_error(self) -> float:
        return float(self.errors.mean())

    @property
    def n(self) -> int:
        return len(self.generators)

    def mass(self) -> np.ndarray:
        """Σ_{m,j} α_{i,j}^{(m)} por objetivo."""
        return self.coefficients.sum(axis=(1, 2))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "max_error": self.max_error,
            "mean_error": self.mean_error,
            "errors": self.errors.tolist(),
            "shifts": list(self.shifts),
            "generators": [g.to_dict() for g in self.generators],
            "coefficients": self.coefficients.tolist(),
            "trace": list(self.trace),
            "iterations": self.iterations,
            "start": self.start,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "AtnWitness":
        for campo in ("generators", "coefficients", "errors", "shifts"):
            if campo not in data:
                raise ValueError(f"AtnWitness requiere campo '{campo}'")
        return cls(
            generators=[StepFunction.from_dict(g) for g in data["generators"]],
            coefficients=np.asarray(data["coefficients"]),
            errors=np.asarray(data["errors"]),
            shifts=tuple(data["shifts"]),
            trace=list(data.get("trace", [])),
            iterations=int(data.get("iterations", 0)),
            start=data.get("start", "targets"),
        )


def defect_rows(profile: Sequence[AtnWitness]) -> List[dict]:
    """Filas (n, e*, media, iteraciones, arranque) de un perfil de defecto para CSV."""
    return [{"n": w.n, "max_error": w.max_error, "mean_error": w.mean_error, "iterations": w.iterations,
             "start": w.start} for w in profile]
