"""
Programación lineal densa

Simplex de tableau en dos fases con la regla de Bland (sin ciclos en
problemas degenerados). Pensado para los LP pequeños del resolvedor
AT(n); el backend 'highs' delega en scipy.optimize.linprog.

Forma aceptada:
    minimizar c·x  sujeto a  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from ..utils.constants import LP_BACKENDS, SIMPLEX_MAX_PIVOTS, SIMPLEX_TOLERANCE

logger = logging.getLogger(__name__)


class LinearProgramError(RuntimeError):
    """El LP es infactible, no acotado o agotó el presupuesto de pivotes."""


@dataclass
class LPResult:
    """
    Attributes:
        x (np.ndarray): Solución óptima
        value (float): c·x
        pivots (int): Pivotes realizados (0 con HiGHS)
        backend (str): 'simplex' o 'highs'
    """

    x: np.ndarray
    value: float
    pivots: int = 0
    backend: str = "simplex"


def _as_matrix(a: Optional[np.ndarray], columns: int) -> np.ndarray:
    if a is None:
        return np.zeros((0, columns))
    return np.atleast_2d(np.asarray(a, dtype=np.float64))


def _as_vector(b: Optional[np.ndarray]) -> np.ndarray:
    if b is None:
        return np.zeros(0)
    return np.asarray(b, dtype=np.float64).reshape(-1)


def _pivot(tableau: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    columna = tableau[:, col].copy()
    columna[row] = 0.0
    tableau -= np.outer(columna, tableau[row])


def _run_phase(tableau: np.ndarray, basis: np.ndarray, allowed: int, pivots: int, tol: float) -> int:
    """
    Itera con la regla de Bland hasta optimalidad.

    La última fila es la de costos reducidos; la última columna, el lado derecho.
    Solo las primeras `allowed` columnas pueden entrar a la base.
    """
    filas = tableau.shape[0] - 1
    while True:
        costos = tableau[-1, :allowed]
        candidatas = np.flatnonzero(costos < -tol)
        if candidatas.size == 0:
            return pivots
        entra = int(candidatas[0])
        columna = tableau[:filas, entra]
        positivas = np.flatnonzero(columna > tol)
        if positivas.size == 0:
            raise LinearProgramError("El LP no está acotado")
        razones = tableau[positivas, -1] / columna[positivas]
        mejor = razones.min()
        empatadas = positivas[razones <= mejor + tol * max(1.0, abs(mejor))]
        # Bland: entre empates sale la variable básica de menor índice
        sale = int(empatadas[np.argmin(basis[empatadas])])
        _pivot(tableau, sale, entra)
        basis[sale] = entra
        pivots += 1
        if pivots > SIMPLEX_MAX_PIVOTS:
            raise LinearProgramError(f"Se agotó el presupuesto de {SIMPLEX_MAX_PIVOTS} pivotes")


def simplex(c: np.ndarray, A_ub=None, b_ub=None, A_eq=None, b_eq=None, tol: float = SIMPLEX_TOLERANCE) -> LPResult:
    """
    Resuelve el LP con el simplex de tableau en dos fases.

    Raises:
        LinearProgramError: Si el problema es infactible o no acotado
    """
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    n = c.shape[0]
    a_ub, b_ub = _as_matrix(A_ub, n), _as_vector(b_ub)
    a_eq, b_eq = _as_matrix(A_eq, n), _as_vector(b_eq)
    m_ub, m_eq = a_ub.shape[0], a_eq.shape[0]
    m = m_ub + m_eq

    # Forma estándar: holguras para las desigualdades
    a = np.zeros((m, n + m_ub))
    a[:m_ub, :n] = a_ub
    a[:m_ub, n:] = np.eye(m_ub)
    a[m_ub:, :n] = a_eq
    b = np.concatenate([b_ub, b_eq])
    negativas = b < 0
    a[negativas] *= -1
    b[negativas] *= -1
    variables = n + m_ub

    # Fase 1: una artificial por fila
    tableau = np.zeros((m + 1, variables + m + 1))
    tableau[:m, :variables] = a
    tableau[:m, variables:variables + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[-1, :variables] = -a.sum(axis=0)
    tableau[-1, -1] = -b.sum()
    basis = np.arange(variables, variables + m)

    pivots = _run_phase(tableau, basis, variables + m, 0, tol)
    escala = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -tableau[-1, -1] > 1e-8 * escala:
        raise LinearProgramError("El LP es infactible")

    # Sacar artificiales de la base; las filas redundantes se eliminan
    conservar = []
    for fila in range(m):
        if basis[fila] < variables:
            conservar.append(fila)
            continue
        candidatas = np.flatnonzero(np.abs(tableau[fila, :variables]) > tol)
        if candidatas.size == 0:
            continue
        _pivot(tableau, fila, int(candidatas[0]))
        basis[fila] = int(candidatas[0])
        pivots += 1
        conservar.append(fila)

    fase2 = np.zeros((len(conservar) + 1, variables + 1))
    fase2[:-1, :variables] = tableau[conservar, :variables]
    fase2[:-1, -1] = tableau[conservar, -1]
    basis = basis[conservar]
    costos = np.concatenate([c, np.zeros(m_ub)])
    fase2[-1, :variables] = costos
    for fila, var in enumerate(basis):
        fase2[-1] -= costos[var] * fase2[fila]

    pivots = _run_phase(fase2, basis, variables, pivots, tol)

    x = np.zeros(variables)
    x[basis] = fase2[:-1, -1]
    x = np.maximum(x[:n], 0.0)
    logger.debug(f"Simplex: {pivots} pivotes, {m} restricciones, {n} variables")
    return LPResult(x, float(c @ x), pivots, "simplex")


def solve_lp(c: np.ndarray, A_ub=None, b_ub=None, A_eq=None, b_eq=None, backend: str = "simplex") -> LPResult:
    """
    minimizar c·x con x >= 0, por el backend elegido.

    Raises:
        ValueError: Backend desconocido
        LinearProgramError: LP infactible o no acotado
    """
    if backend not in LP_BACKENDS:
        raise ValueError(f"Backend de LP desconocido: {backend!r} (opciones: {LP_BACKENDS})")
    if backend == "simplex":
        return simplex(c, A_ub, b_ub, A_eq, b_eq)

    resultado = linprog(
        c,
        A_ub=A_ub if A_ub is not None and len(A_ub) else None,
        b_ub=b_ub if b_ub is not None and len(b_ub) else None,
        A_eq=A_eq if A_eq is not None and len(A_eq) else None,
        b_eq=b_eq if b_eq is not None and len(b_eq) else None,
        bounds=(0, None),
        method="highs",
    )
    if not resultado.success:
        raise LinearProgramError(f"HiGHS no encontró óptimo: {resultado.message}")
    x = np.maximum(resultado.x, 0.0)
    return LPResult(x, float(np.asarray(c) @ x), 0, "highs")
