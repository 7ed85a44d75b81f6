"""
Modelos simbólicos: alfabetos, soportes y palabras

Este módulo define los tipos inmutables que consume todo lo demás:
Alphabet, Support, FunnyWord y Word. Internamente los símbolos van de
0 a k-1; la salida hacia el usuario usa la convención 1..k.
"""

import re
from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, Sequence, Tuple

import numpy as np

from ..core.errors import AlphabetError

_TEXT_PATTERN = re.compile(
    r"^\s*(?:Λ|L|Lambda)\s*=\s*\[(?P<support>[^\]]*)\]\s*;\s*W\s*=\s*\[(?P<symbols>[^\]]*)\]\s*$"
)


def _parse_int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    return [int(item) for item in text.split(",")]


@dataclass(frozen=True)
class Alphabet:
    """
    Alfabeto {0, ..., k-1} (en el texto matemático {1, ..., k}).

    Attributes:
        size (int): Número de símbolos k (k >= 2)
    """

    size: int

    def __post_init__(self):
        if isinstance(self.size, bool) or not isinstance(self.size, (int, np.integer)):
            raise TypeError(f"El tamaño del alfabeto debe ser entero, recibido: {self.size!r}")
        if self.size < 2:
            raise ValueError(f"El alfabeto necesita al menos 2 símbolos, recibido: {self.size}")
        object.__setattr__(self, "size", int(self.size))

    def __len__(self) -> int:
        return self.size

    @property
    def symbols(self) -> range:
        return range(self.size)

    def contains(self, symbol: int) -> bool:
        return 0 <= symbol < self.size

    def from_one_based(self, symbol: int) -> int:
        """Símbolo 1-based a la representación interna."""
        if not 1 <= symbol <= self.size:
            raise AlphabetError(f"Símbolo {symbol} fuera de 1..{self.size}")
        return symbol - 1


@dataclass(frozen=True)
class Support:
    """
    Conjunto finito de coordenadas Λ, guardado ordenado y sin repetidos.

    Attributes:
        indices (Tuple[int, ...]): Índices estrictamente crecientes

    Example:
        >>> Support.from_iterable([4, -1, 2])
        Support(indices=(-1, 2, 4))
    """

    indices: Tuple[int, ...]

    def __post_init__(self):
        indices = tuple(int(i) for i in self.indices)
        if not indices:
            raise ValueError("El soporte no puede estar vacío")
        for anterior, siguiente in zip(indices, indices[1:]):
            if siguiente <= anterior:
                raise ValueError(f"Los índices del soporte deben ser estrictamente crecientes: {indices}")
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_iterable(cls, values: Iterable[int]) -> "Support":
        """Construye un soporte desde índices en cualquier orden; rechaza duplicados."""
        valores = [int(v) for v in values]
        if len(set(valores)) != len(valores):
            raise ValueError(f"El soporte tiene índices duplicados: {valores}")
        return cls(tuple(sorted(valores)))

    @classmethod
    def interval(cls, start: int, stop: int) -> "Support":
        """Intervalo entero cerrado {start, ..., stop}."""
        if stop < start:
            raise ValueError(f"Intervalo vacío: [{start}, {stop}]")
        return cls(tuple(range(start, stop + 1)))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, index: int) -> bool:
        return index in self._index_set

    @cached_property
    def _index_set(self) -> FrozenSet[int]:
        return frozenset(self.indices)

    @property
    def size(self) -> int:
        """|Λ|"""
        return len(self.indices)

    @property
    def start(self) -> int:
        return self.indices[0]

    @property
    def stop(self) -> int:
        return self.indices[-1]

    @property
    def is_interval(self) -> bool:
        return self.stop - self.start + 1 == self.size

    def within(self, start: int, stop: int) -> bool:
        """True si todo el soporte cae en el intervalo [start, stop]."""
        return start <= self.start and self.stop <= stop

    def shift(self, t: int) -> "Support":
        return Support(tuple(i + int(t) for i in self.indices))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.int64)

    def offsets_from(self, origin: int) -> np.ndarray:
        """Posiciones del soporte relativas a una ventana que empieza en origin."""
        return self.as_array() - int(origin)

    def __str__(self) -> str:
        return "[" + ",".join(str(i) for i in self.indices) + "]"


@dataclass(frozen=True)
class FunnyWord:
    """
    Palabra "funny": asignación de símbolos sobre un soporte finito Λ.

    Attributes:
        support (Support): Coordenadas Λ
        symbols (Tuple[int, ...]): Un símbolo 0-based por índice del soporte
        k (int): Tamaño del alfabeto
    """

    support: Support
    symbols: Tuple[int, ...]
    k: int

    def __post_init__(self):
        if not isinstance(self.support, Support):
            raise TypeError("support debe ser un Support")
        alphabet = Alphabet(self.k)
        symbols = tuple(int(s) for s in self.symbols)
        if len(symbols) != len(self.support):
            raise ValueError(
                f"Se esperaban {len(self.support)} símbolos para el soporte, recibidos: {len(symbols)}"
            )
        for symbol in symbols:
            if not alphabet.contains(symbol):
                raise AlphabetError(f"Símbolo {symbol} fuera del alfabeto de tamaño {self.k}")
        object.__setattr__(self, "symbols", symbols)
        object.__setattr__(self, "k", alphabet.size)

    # ==================== CONSTRUCTORES ====================

    @classmethod
    def from_mapping(cls, assignment: dict[int, int], k: int) -> "FunnyWord":
        """Construye desde {índice: símbolo 0-based}."""
        support = Support.from_iterable(assignment.keys())
        return cls(support, tuple(assignment[i] for i in support), k)

    @classmethod
    def from_one_based(cls, indices: Sequence[int], symbols: Sequence[int], k: int) -> "FunnyWord":
        """Construye desde índices y símbolos 1-based en el mismo orden."""
        if len(indices) != len(symbols):
            raise ValueError("Índices y símbolos deben tener la misma longitud")
        alphabet = Alphabet(k)
        pares = {int(i): alphabet.from_one_based(int(s)) for i, s in zip(indices, symbols)}
        if len(pares) != len(indices):
            raise ValueError(f"El soporte tiene índices duplicados: {list(indices)}")
        return cls.from_mapping(pares, k)

    @classmethod
    def from_text(cls, text: str, k: int) -> "FunnyWord":
        """
        Lee el formato de texto `Λ=[n1,n2,...]; W=[s1,s2,...]` (símbolos 1-based).

        Raises:
            ValueError: Si el texto no respeta el formato
        """
        match = _TEXT_PATTERN.match(text)
        if match is None:
            raise ValueError(f"Formato de palabra inválido: {text!r} (se espera 'Λ=[...]; W=[...]')")
        try:
            indices = _parse_int_list(match.group("support"))
            symbols = _parse_int_list(match.group("symbols"))
        except ValueError as e:
            raise ValueError(f"Formato de palabra inválido: {text!r} ({e})") from e
        return cls.from_one_based(indices, symbols, k)

    # ==================== ACCESO ====================

    def __len__(self) -> int:
        return len(self.symbols)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.symbols, dtype=np.int64)

    def shift(self, t: int) -> "FunnyWord":
        return FunnyWord(self.support.shift(t), self.symbols, self.k)

    def to_text(self) -> str:
        """Formato de texto con símbolos 1-based."""
        simbolos = ",".join(str(s + 1) for s in self.symbols)
        return f"Λ={self.support}; W=[{simbolos}]"

    def to_dict(self) -> dict:
        return {"support": list(self.support.indices), "symbols": [s + 1 for s in self.symbols], "k": self.k}

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Word(FunnyWord):
    """
    Palabra contigua [y_0, ..., y_m]_n: una FunnyWord sobre {n, ..., n+m}.
    """

    def __post_init__(self):
        super().__post_init__()
        if not self.support.is_interval:
            raise ValueError(f"Una Word necesita soporte contiguo, recibido: {self.support}")

    @classmethod
    def from_symbols(cls, start: int, symbols: Sequence[int], k: int) -> "Word":
        """Palabra que empieza en start con símbolos 0-based."""
        if len(symbols) == 0:
            raise ValueError("Una Word necesita al menos un símbolo")
        return cls(Support.interval(start, start + len(symbols) - 1), tuple(symbols), k)

    @property
    def start(self) -> int:
        return self.support.start

    @property
    def stop(self) -> int:
        return self.support.stop

    def shift(self, t: int) -> "Word":
        return Word(self.support.shift(t), self.symbols, self.k)
