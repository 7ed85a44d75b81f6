"""
Configuración de logging

Los módulos solo piden su logger con logging.getLogger(__name__);
la configuración del root logger se hace una sola vez desde la CLI.
Los logs van a stderr para que el reporte en stdout quede limpio.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"
DATE_FORMAT = "%H:%M:%S"


def setup_logging(level: int = logging.INFO, log_file: Optional[str | Path] = None) -> logging.Logger:
    """
    Configura el root logger.

    Args:
        level: Nivel mínimo (logging.DEBUG, logging.INFO, ...)
        log_file: Archivo adicional donde escribir los logs (opcional)

    Returns:
        logging.Logger: El root logger ya configurado
    """
    root = logging.getLogger()
    root.setLevel(level)

    # Evitar handlers duplicados si la CLI se invoca varias veces (pruebas)
    for handler in list(root.handlers):
        if getattr(handler, "_atn_lab", False):
            root.removeHandler(handler)

    formatter = logging.Formatter(LOG_FORMAT, DATE_FORMAT)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setFormatter(formatter)
    stream_handler._atn_lab = True
    root.addHandler(stream_handler)

    if log_file is not None:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        file_handler._atn_lab = True
        root.addHandler(file_handler)

    return root


def level_from_flags(verbose: bool = False, quiet: bool = False) -> int:
    """Traduce las banderas -v / -q de la CLI a un nivel de logging."""
    if verbose:
        return logging.DEBUG
    if quiet:
        return logging.WARNING
    return logging.INFO
