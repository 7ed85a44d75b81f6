"""
Utilidades JSON

Serialización de reportes, problemas y testigos. Convierte tipos de numpy,
Fraction y complejos a valores JSON estables para que dos corridas con la
misma semilla produzcan bytes idénticos.
"""

import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .file_utils import ensure_parent_dir

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """
    Convierte recursivamente un valor a tipos nativos de JSON.

    Args:
        value: dict, list, tupla, escalar numpy, ndarray, Fraction, complex...

    Returns:
        Valor equivalente usando solo dict/list/str/int/float/bool/None
    """
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": float(value.real), "im": float(value.imag)}
    if hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    return value


def dumps(data: Any, indent: int | None = 2) -> str:
    """JSON con llaves en orden de inserción y sin ASCII escapado."""
    return json.dumps(to_jsonable(data), indent=indent, ensure_ascii=False)


def save_json(data: Any, path: str | Path) -> Path:
    """
    Guarda data como JSON.

    Returns:
        Path: Ruta escrita
    """
    ruta = ensure_parent_dir(path)
    with open(ruta, "w", encoding="utf-8") as f:
        f.write(dumps(data))
        f.write("\n")
    logger.info(f"📂 JSON guardado: {ruta}")
    return ruta


def load_json(path: str | Path) -> Any:
    """
    Carga un archivo JSON.

    Raises:
        FileNotFoundError: Si el archivo no existe
        json.JSONDecodeError: Si el JSON es inválido
    """
    ruta = Path(path)
    if not ruta.exists():
        logger.error(f"❌ Archivo no encontrado: {ruta}")
        raise FileNotFoundError(f"Archivo no encontrado: {ruta}")
    with open(ruta, "r", encoding="utf-8") as f:
        return json.load(f)
