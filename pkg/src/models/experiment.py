"""
Modelos de experimentos de la CLI

ExperimentConfig es la fuente única de verdad de una corrida (valores
por defecto ← archivo de configuración ← línea de comandos) y
ExperimentReport lo que se emite al final.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..core.errors import ConfigError
from ..utils.constants import EXIT_CHECK_FAILED, EXIT_OK
from ..utils.file_utils import line_of_key

OUTPUT_FORMATS = ("json", "markdown", "html")


@dataclass
class ExperimentConfig:
    """
    Configuración validable de un experimento.

    Attributes:
        command (str): Subcomando ('ball', 'furstenberg.pair-corr', ...)
        params (Dict): Parámetros fusionados de la operación
        origins (Dict): De dónde salió cada parámetro ('default', 'file', 'cli')
        source (str | None): Ruta del archivo de configuración
        text (str | None): Contenido del archivo (para ubicar líneas)
    """

    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    origins: Dict[str, str] = field(default_factory=dict)
    source: Optional[str] = None
    text: Optional[str] = field(default=None, repr=False)

    def get(self, key: str, default: Any = None) -> Any:
        valor = self.params.get(key)
        return default if valor is None else valor

    def has(self, key: str) -> bool:
        return self.params.get(key) is not None

    def error(self, key: str, message: str) -> ConfigError:
        """
        ConfigError que apunta a la línea del archivo si el valor salió de ahí.
        """
        if self.origins.get(key) == "file" and self.source is not None:
            linea = line_of_key(self.text or "", key)
            return ConfigError(f"{key}: {message}", self.source, linea)
        opcion = "--" + key.replace("_", "-")
        return ConfigError(f"{opcion}: {message}")

    @property
    def seed(self) -> int:
        return int(self.get("seed", 0))

    @property
    def workers(self) -> int:
        return int(self.get("workers", 1))

    @property
    def output_format(self) -> str:
        return self.get("format", "json")

    def to_dict(self) -> dict:
        """Eco de la configuración (sin rutas de salida)."""
        ocultas = {"out", "csv", "trace", "config", "verbose", "quiet", "log_file"}
        return {
            "command": self.command,
            "params": {k: v for k, v in sorted(self.params.items()) if k not in ocultas and v is not None},
        }


@dataclass
class ExperimentReport:
    """
    Resultado de una corrida.

    Attributes:
        config (ExperimentConfig): Configuración usada
        version (str): Versión estilo git de la herramienta
        wall_time (float): Segundos de reloj (fuera del payload)
        payload (Dict): Resultados propios de la operación
        checks (List[Dict]): Verificaciones con llave 'pass'
        csv_text (str | None): Tabla CSV de la operación
        trace (list | None): Trazas del resolvedor AT(n)
    """

    config: ExperimentConfig
    version: str
    payload: Dict[str, Any]
    checks: List[Dict[str, Any]] = field(default_factory=list)
    wall_time: float = 0.0
    csv_text: Optional[str] = field(default=None, repr=False)
    trace: Optional[List[Any]] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(check.get("pass", True) for check in self.checks)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK_FAILED

    def to_dict(self, include_timing: bool = True) -> dict:
        datos = {
            "tool": self.version,
            "config": self.config.to_dict(),
            "payload": self.payload,
            "checks": self.checks,
            "pass": self.passed,
        }
        if include_timing:
            datos["wall_time_s"] = round(self.wall_time, 6)
        return datos
