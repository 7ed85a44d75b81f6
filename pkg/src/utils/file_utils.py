"""Utilidades de archivos."""

import csv
import io
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence


def ensure_parent_dir(path: str | Path) -> Path:
    """Crea el directorio padre de path si no existe y devuelve el Path."""
    ruta = Path(path)
    if ruta.parent and not ruta.parent.exists():
        ruta.parent.mkdir(parents=True, exist_ok=True)
    return ruta


def write_text(path: str | Path, text: str) -> Path:
    """Escribe texto UTF-8 creando directorios intermedios."""
    ruta = ensure_parent_dir(path)
    with open(ruta, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return ruta


def rows_to_csv(rows: List[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """
    Tabla de diccionarios a CSV con encabezado.

    Los flotantes se escriben con repr para no perder dígitos.
    """
    columns = list(columns or (rows[0].keys() if rows else []))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in (row.get(c, "") for c in columns)])
    return buffer.getvalue()


def line_of_key(text: str, key: str) -> int | None:
    """
    Número de línea (1-based) donde aparece "key" como llave JSON.

    Se usa para que los errores de configuración apunten a la línea exacta.
    """
    needles = {f'"{key}"', f'"{key.replace("_", "-")}"'}
    for numero, linea in enumerate(text.splitlines(), start=1):
        if any(needle in linea for needle in needles):
            return numero
    return None
