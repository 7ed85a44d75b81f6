"""
Configuración de experimentos

Los archivos de configuración son JSON con las mismas llaves que las
opciones largas de la CLI (con '-' → '_'). El orden de precedencia es
valores por defecto ← archivo ← línea de comandos.

Los validadores convierten y revisan rangos antes de cualquier cálculo;
los errores salen como ConfigError con 'ruta:línea' cuando el valor
vino de un archivo.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..core.errors import ConfigError
from ..models.experiment import OUTPUT_FORMATS, ExperimentConfig
from .constants import DEFAULT_CONFIDENCE
from .file_utils import line_of_key

logger = logging.getLogger(__name__)

# Valores por defecto comunes a todos los subcomandos
COMMON_DEFAULTS: Dict[str, Any] = {
    "seed": 0,
    "workers": 1,
    "format": "json",
    "confidence": DEFAULT_CONFIDENCE,
}


# ==================== CARGA ====================

def load_config_file(path: str | Path) -> Tuple[Dict[str, Any], str]:
    """
    Lee un archivo JSON de configuración.

    Returns:
        (valores, texto)

    Raises:
        ConfigError: Si no existe, no es JSON o no es un objeto
    """
    ruta = Path(path)
    if not ruta.exists():
        logger.error(f"❌ Archivo de configuración no encontrado: {ruta}")
        raise ConfigError("archivo no encontrado", str(ruta))
    texto = ruta.read_text(encoding="utf-8")
    try:
        datos = json.loads(texto)
    except json.JSONDecodeError as e:
        logger.error(f"❌ JSON inválido en {ruta}: {e.msg}")
        raise ConfigError(f"JSON inválido: {e.msg}", str(ruta), e.lineno) from e
    if not isinstance(datos, dict):
        raise ConfigError("la configuración debe ser un objeto JSON", str(ruta), 1)
    valores = {str(k).replace("-", "_"): v for k, v in datos.items()}
    logger.debug(f"📂 Configuración cargada de {ruta}: {sorted(valores)}")
    return valores, texto


def build_config(command: str, cli_values: Dict[str, Any], defaults: Optional[Dict[str, Any]] = None,
                 config_path: Optional[str | Path] = None) -> ExperimentConfig:
    """
    Fusiona valores por defecto, archivo y línea de comandos (gana la CLI).

    Los valores None de la CLI significan "no dado".
    """
    params: Dict[str, Any] = {}
    origins: Dict[str, str] = {}
    for key, value in {**COMMON_DEFAULTS, **(defaults or {})}.items():
        params[key] = value
        origins[key] = "default"

    texto = None
    fuente = None
    if config_path is not None:
        archivo, texto = load_config_file(config_path)
        fuente = str(config_path)
        comando_archivo = archivo.pop("command", None)
        if comando_archivo is not None and comando_archivo != command:
            raise ConfigError(
                f"el archivo es para '{comando_archivo}', no para '{command}'", fuente,
                line_of_key(texto, "command"),
            )
        for key, value in archivo.items():
            params[key] = value
            origins[key] = "file"

    for key, value in cli_values.items():
        if value is not None:
            params[key] = value
            origins[key] = "cli"

    return ExperimentConfig(command, params, origins, fuente, texto)


# ==================== VALIDADORES ====================

def require_int(cfg: ExperimentConfig, key: str, minimum: Optional[int] = None,
                maximum: Optional[int] = None) -> int:
    """Entero en [minimum, maximum]."""
    valor = cfg.get(key)
    if valor is None:
        raise cfg.error(key, "valor requerido")
    if isinstance(valor, bool):
        raise cfg.error(key, f"se esperaba un entero, recibido: {valor!r}")
    try:
        numero = int(valor)
        if isinstance(valor, float) and numero != valor:
            raise ValueError
    except (TypeError, ValueError):
        raise cfg.error(key, f"se esperaba un entero, recibido: {valor!r}") from None
    if minimum is not None and numero < minimum:
        raise cfg.error(key, f"debe ser >= {minimum}, recibido: {numero}")
    if maximum is not None and numero > maximum:
        raise cfg.error(key, f"debe ser <= {maximum}, recibido: {numero}")
    return numero


def require_float(cfg: ExperimentConfig, key: str, low: Optional[float] = None, high: Optional[float] = None,
                  open_interval: bool = True) -> float:
    """Real finito en (low, high) (o [low, high] con open_interval=False)."""
    valor = cfg.get(key)
    if valor is None:
        raise cfg.error(key, "valor requerido")
    try:
        numero = float(valor)
    except (TypeError, ValueError):
        raise cfg.error(key, f"se esperaba un número, recibido: {valor!r}") from None
    if not math.isfinite(numero):
        raise cfg.error(key, f"debe ser finito, recibido: {valor!r}")
    if open_interval:
        fuera = (low is not None and numero <= low) or (high is not None and numero >= high)
        intervalo = f"({low}, {high})"
    else:
        fuera = (low is not None and numero < low) or (high is not None and numero > high)
        intervalo = f"[{low}, {high}]"
    if fuera:
        raise cfg.error(key, f"debe estar en {intervalo}, recibido: {numero}")
    return numero


def require_choice(cfg: ExperimentConfig, key: str, choices: Sequence[str]) -> str:
    valor = cfg.get(key)
    if valor not in choices:
        raise cfg.error(key, f"opción inválida {valor!r} (opciones: {', '.join(choices)})")
    return valor


def parse_window(cfg: ExperimentConfig, key: str) -> Tuple[int, int]:
    """Ventana 'a:b' (o lista [a, b] en el archivo) con a <= b."""
    valor = cfg.get(key)
    if valor is None:
        raise cfg.error(key, "valor requerido")
    try:
        if isinstance(valor, (list, tuple)):
            a, b = (int(v) for v in valor)
        else:
            a, b = (int(v) for v in str(valor).split(":"))
    except (TypeError, ValueError):
        raise cfg.error(key, f"ventana inválida {valor!r} (se espera 'a:b')") from None
    if b < a:
        raise cfg.error(key, f"ventana vacía [{a}, {b}]")
    return a, b


def parse_int_list(cfg: ExperimentConfig, key: str) -> List[int]:
    """
    Lista de enteros: '1,2,5', rango inclusivo 'a:b' o lista JSON.
    """
    valor = cfg.get(key)
    if valor is None:
        raise cfg.error(key, "valor requerido")
    try:
        if isinstance(valor, (list, tuple)):
            numeros = [int(v) for v in valor]
        elif isinstance(valor, int):
            numeros = [valor]
        elif ":" in str(valor):
            a, b = (int(v) for v in str(valor).split(":"))
            numeros = list(range(a, b + 1))
        else:
            numeros = [int(v) for v in str(valor).split(",") if v.strip()]
    except (TypeError, ValueError):
        raise cfg.error(key, f"lista de enteros inválida: {valor!r}") from None
    if not numeros:
        raise cfg.error(key, "la lista no puede estar vacía")
    return numeros


def parse_key_values(cfg: ExperimentConfig, key: str, text: str) -> Dict[str, str]:
    """'k=2,alpha=0.6,window=0:9' → dict."""
    pares = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise cfg.error(key, f"se esperaba 'clave=valor', recibido: {item!r}")
        clave, valor = item.split("=", 1)
        pares[clave.strip()] = valor.strip()
    return pares


def validate_output(cfg: ExperimentConfig) -> None:
    """Formato de salida, semilla y workers."""
    require_choice(cfg, "format", OUTPUT_FORMATS)
    require_int(cfg, "seed", minimum=0)
    require_int(cfg, "workers", minimum=1, maximum=256)
