"""
Núcleo simbólico

Distancia de Hamming exacta, restricción de palabras a soportes y
traslación de índices (la acción del shift sobre soportes). Todas las
operaciones son puras sobre valores inmutables.
"""

import math
from fractions import Fraction
from numbers import Rational
from typing import Sequence

from ..models.symbolic import FunnyWord, Support, Word
from ..utils.constants import RATIONAL_DENOMINATOR_LIMIT
from .errors import SupportMismatchError, SupportOutOfRangeError


def as_rational(value: float | Fraction | int | str) -> Fraction:
    """
    Lee un radio o umbral como racional exacto.

    Los flotantes se leen con limit_denominator para que 0.1 sea 1/10 y
    1/3 sea 1/3; así las fronteras enteras de ε·|Λ| se detectan bien.
    """
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if not math.isfinite(value):
        raise ValueError(f"Valor no finito: {value}")
    return Fraction(value).limit_denominator(RATIONAL_DENOMINATOR_LIMIT)


def mismatch_count(w: FunnyWord, w_prime: FunnyWord) -> int:
    """Número de posiciones donde difieren dos palabras con el mismo soporte."""
    if w.support != w_prime.support:
        raise SupportMismatchError()
    return sum(1 for a, b in zip(w.symbols, w_prime.symbols) if a != b)


def hamming_distance(w: FunnyWord, w_prime: FunnyWord) -> Fraction:
    """
    d_Λ(W, W') = card{n ∈ Λ: W_n ≠ W'_n} / |Λ|, como racional exacto.

    Raises:
        SupportMismatchError: Si los soportes difieren
    """
    return Fraction(mismatch_count(w, w_prime), len(w.support))


def strict_radius_count(eps: float | Fraction, m: int) -> int:
    """
    K_max: el mayor entero estrictamente menor que ε·m.

    Una palabra está en la bola abierta de radio ε sobre |Λ| = m
    exactamente cuando tiene a lo más K_max discrepancias.
    """
    producto = as_rational(eps) * m
    if producto.denominator == 1:
        return int(producto) - 1
    return math.floor(producto)


def restrict(x: Word, support: Support) -> FunnyWord:
    """
    x|_Λ: la palabra funny (x_n)_{n∈Λ}.

    Raises:
        SupportOutOfRangeError: Si Λ no está contenido en el dominio de x
    """
    if not support.within(x.start, x.stop):
        raise SupportOutOfRangeError()
    simbolos = tuple(x.symbols[i - x.start] for i in support)
    return FunnyWord(support, simbolos, x.k)


def shift_support(support: Support, t: int) -> Support:
    """Traslada cada índice del soporte en t."""
    return support.shift(t)


def shift_word(w: FunnyWord, t: int) -> FunnyWord:
    """Traslada la palabra junto con su soporte."""
    return w.shift(t)


def centered_cylinder(symbols: Sequence[int], k: int) -> Word:
    """
    Cilindro centrado [y_0, ..., y_2m]_{-m} como Word.

    Raises:
        ValueError: Si la cantidad de símbolos no es impar
    """
    if len(symbols) % 2 != 1:
        raise ValueError(f"Un cilindro centrado necesita 2m+1 símbolos, recibidos: {len(symbols)}")
    m = len(symbols) // 2
    return Word.from_symbols(-m, symbols, k)
