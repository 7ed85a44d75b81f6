"""
Persistencia de medidas empíricas

Dos formatos:

- Texto (.txt / cualquier extensión): cabecera con líneas "# clave=valor"
  (window, alphabet, samples, seed) y luego una muestra por línea con
  símbolos 1-based; contiguos si el alfabeto tiene a lo más 9 símbolos,
  separados por espacios en otro caso.
- Binario (.npz): arreglos comprimidos de numpy con los mismos campos.
"""

import logging
from pathlib import Path
from typing import Dict, Tuple

import numpy as np

from ..utils.file_utils import ensure_parent_dir
from .errors import MeasureFileError
from .measures import EmpiricalMeasure

logger = logging.getLogger(__name__)

MAGIC = "# atn-lab empirical-measure v1"
REQUIRED_KEYS = ("window", "alphabet", "samples", "seed")


def _is_binary(path: Path) -> bool:
    return path.suffix.lower() == ".npz"


def save_empirical_measure(em: EmpiricalMeasure, path: str | Path) -> Path:
    """
    Guarda una medida empírica (formato según la extensión).

    Returns:
        Path: Ruta escrita
    """
    ruta = ensure_parent_dir(path)
    if _is_binary(ruta):
        np.savez_compressed(
            ruta,
            samples=em.samples,
            window=np.asarray(em.window, dtype=np.int64),
            alphabet=np.int64(em.k),
            seed=np.int64(-1 if em.seed is None else em.seed),
        )
    else:
        separador = "" if em.k <= 9 else " "
        with open(ruta, "w", encoding="utf-8", newline="\n") as f:
            f.write(MAGIC + "\n")
            f.write(f"# window={em.window[0]},{em.window[1]}\n")
            f.write(f"# alphabet={em.k}\n")
            f.write(f"# samples={em.sample_count}\n")
            f.write(f"# seed={'none' if em.seed is None else em.seed}\n")
            for fila in em.samples:
                f.write(separador.join(str(int(s) + 1) for s in fila))
                f.write("\n")
    logger.info(f"📂 Medida empírica guardada: {ruta} ({em.sample_count} muestras)")
    return ruta


def _parse_header(ruta: Path, lineas: list[str]) -> Tuple[Dict[str, str], Dict[str, int], int]:
    """
    Claves de cabecera, línea de cada clave y número de la primera línea de datos.
    """
    if not lineas or lineas[0].strip() != MAGIC:
        raise MeasureFileError(ruta, 1, f"cabecera inválida, se esperaba {MAGIC!r}")
    cabecera: Dict[str, str] = {}
    posiciones: Dict[str, int] = {}
    inicio_datos = 2
    for numero, linea in enumerate(lineas[1:], start=2):
        if not linea.startswith("#"):
            break
        inicio_datos = numero + 1
        clave, _, valor = linea[1:].strip().partition("=")
        clave = clave.strip()
        if not valor:
            raise MeasureFileError(ruta, numero, f"línea de cabecera sin '=': {linea.strip()!r}")
        if clave in cabecera:
            raise MeasureFileError(ruta, numero,
                                   f"clave de cabecera repetida '{clave}' (ya en la línea {posiciones[clave]})")
        cabecera[clave] = valor.strip()
        posiciones[clave] = numero
    for clave in REQUIRED_KEYS:
        if clave not in cabecera:
            raise MeasureFileError(ruta, 1, f"falta la clave de cabecera '{clave}'")
    return cabecera, posiciones, inicio_datos


def _load_text(ruta: Path) -> EmpiricalMeasure:
    with open(ruta, "r", encoding="utf-8") as f:
        lineas = f.read().splitlines()
    cabecera, posiciones, inicio_datos = _parse_header(ruta, lineas)
    clave = "window"
    try:
        a, b = (int(v) for v in cabecera["window"].split(","))
        clave = "alphabet"
        k = int(cabecera["alphabet"])
        clave = "samples"
        total = int(cabecera["samples"])
        clave = "seed"
        seed = None if cabecera["seed"] == "none" else int(cabecera["seed"])
    except ValueError as e:
        raise MeasureFileError(ruta, posiciones[clave], f"valor de cabecera inválido ({e})") from e

    longitud = b - a + 1
    datos = lineas[inicio_datos - 1:]
    if len(datos) != total:
        raise MeasureFileError(ruta, inicio_datos, f"se declararon {total} muestras y hay {len(datos)}")

    muestras = np.empty((total, longitud), dtype=np.int64)
    for desplazamiento, linea in enumerate(datos):
        numero = inicio_datos + desplazamiento
        try:
            simbolos = [int(c) for c in linea] if k <= 9 else [int(c) for c in linea.split()]
        except ValueError:
            raise MeasureFileError(ruta, numero, f"símbolo no numérico en {linea!r}") from None
        if len(simbolos) != longitud:
            raise MeasureFileError(ruta, numero, f"se esperaban {longitud} símbolos, hay {len(simbolos)}")
        if min(simbolos) < 1 or max(simbolos) > k:
            raise MeasureFileError(ruta, numero, f"símbolo fuera de 1..{k}")
        muestras[desplazamiento] = simbolos
    return EmpiricalMeasure((a, b), muestras - 1, k, seed=seed, source=str(ruta))


def _load_binary(ruta: Path) -> EmpiricalMeasure:
    with np.load(ruta) as archivo:
        faltantes = [c for c in ("samples", "window", "alphabet", "seed") if c not in archivo.files]
        if faltantes:
            raise MeasureFileError(ruta, 0, f"faltan campos: {faltantes}")
        window = tuple(int(v) for v in archivo["window"])
        seed = int(archivo["seed"])
        return EmpiricalMeasure(window, archivo["samples"], int(archivo["alphabet"]),
                                seed=None if seed < 0 else seed, source=str(ruta))


def load_empirical_measure(path: str | Path) -> EmpiricalMeasure:
    """
    Carga una medida empírica desde disco.

    Raises:
        FileNotFoundError: Si el archivo no existe
        MeasureFileError: Si el contenido está mal formado
    """
    ruta = Path(path)
    logger.info(f"📂 Cargando medida empírica: {ruta}")
    if not ruta.exists():
        logger.error(f"❌ Archivo no encontrado: {ruta}")
        raise FileNotFoundError(f"Archivo no encontrado: {ruta}")
    try:
        em = _load_binary(ruta) if _is_binary(ruta) else _load_text(ruta)
    except MeasureFileError as e:
        logger.error(f"❌ {e}")
        raise
    logger.info(f"✅ Medida cargada: {em}")
    return em
