"""
Pruebas del simplex denso
"""

import numpy as np
import pytest
from scipy.optimize import linprog

from src.core.simplex import LinearProgramError, simplex, solve_lp


def test_lp_pequeno():
    """max x + y con x + 2y <= 4, 3x + y <= 6."""
    resultado = simplex(np.array([-1.0, -1.0]), A_ub=[[1, 2], [3, 1]], b_ub=[4, 6])
    assert resultado.value == pytest.approx(-2.8)
    assert resultado.x == pytest.approx([1.6, 1.2])


def test_igualdades_y_lado_derecho_negativo():
    """Igualdades con b < 0 se normalizan antes de la fase 1."""
    resultado = simplex(np.array([1.0, 2.0]), A_eq=[[-1, -1]], b_eq=[-3])
    assert resultado.value == pytest.approx(3.0)
    assert resultado.x == pytest.approx([3.0, 0.0])


def test_infactible():
    """x <= -1 con x >= 0 no tiene solución."""
    with pytest.raises(LinearProgramError):
        simplex(np.array([1.0]), A_ub=[[1.0]], b_ub=[-1.0])


def test_no_acotado():
    """min -x sin restricciones superiores."""
    with pytest.raises(LinearProgramError):
        simplex(np.array([-1.0, 0.0]), A_eq=[[0.0, 1.0]], b_eq=[1.0])


def test_degenerado_no_cicla():
    """Ejemplo clásico de ciclado; Bland termina en el óptimo."""
    c = np.array([-0.75, 150, -0.02, 6])
    a_ub = np.array([
        [0.25, -60, -0.04, 9],
        [0.5, -90, -0.02, 3],
        [0, 0, 1, 0],
    ])
    b_ub = np.array([0, 0, 1])
    resultado = simplex(c, A_ub=a_ub, b_ub=b_ub)
    assert resultado.value == pytest.approx(-0.05, abs=1e-9)


def test_coincide_con_highs(rng):
    """Valores óptimos iguales a scipy.optimize.linprog en LP aleatorios factibles."""
    for _ in range(30):
        n, m_ub, m_eq = 6, 4, 2
        a_ub = rng.random((m_ub, n))
        b_ub = a_ub @ rng.random(n) + 0.5
        a_eq = rng.random((m_eq, n))
        b_eq = a_eq @ rng.random(n)
        c = rng.random(n) - 0.3
        referencia = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if not referencia.success:
            continue
        propio = simplex(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq)
        assert propio.value == pytest.approx(referencia.fun, abs=1e-7)
        via_highs = solve_lp(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, backend="highs")
        assert via_highs.backend == "highs"
        assert via_highs.value == pytest.approx(referencia.fun, abs=1e-7)


def test_backend_desconocido():
    """Solo se aceptan 'simplex' y 'highs'."""
    with pytest.raises(ValueError):
        solve_lp(np.array([1.0]), backend="glpk")
