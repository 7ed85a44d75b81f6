"""
Errores del dominio

Todos heredan de ValueError, así que quien ya captura ValueError
(como hacen los modelos) sigue funcionando.
"""


class SupportMismatchError(ValueError):
    """Dos palabras no comparten el mismo soporte."""

    def __init__(self, message: str = "support mismatch"):
        super().__init__(message)


class SupportOutOfRangeError(ValueError):
    """El soporte pedido no cabe en el dominio de la palabra o ventana."""

    def __init__(self, message: str = "support out of range"):
        super().__init__(message)


class AlphabetError(ValueError):
    """Símbolo fuera del alfabeto."""


class EnumerationBudgetError(ValueError):
    """k^m excede el presupuesto de enumeración."""

    def __init__(self, message: str = "block length exceeds enumeration budget"):
        super().__init__(message)


class WindowMismatchError(ValueError):
    """Funciones escalón definidas sobre ventanas o pesos distintos."""


class ShiftOutOfRangeError(ValueError):
    """La ventana trasladada no se solapa con la ventana destino."""

    def __init__(self, message: str = "shift out of range"):
        super().__init__(message)


class MeasureFileError(ValueError):
    """Archivo de EmpiricalMeasure mal formado."""

    def __init__(self, path, line: int, message: str):
        self.path = path
        self.line = line
        super().__init__(f"{path}:{line}: {message}")


class ConfigError(ValueError):
    """Configuración de experimento inválida."""

    def __init__(self, message: str, source: str | None = None, line: int | None = None):
        self.source = source
        self.line = line
        if source is not None and line is not None:
            message = f"{source}:{line}: {message}"
        elif source is not None:
            message = f"{source}: {message}"
        super().__init__(message)
