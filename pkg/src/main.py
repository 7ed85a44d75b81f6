#!/usr/bin/env python3
"""
Punto de entrada principal de atn-lab

Cada subcomando arma un ExperimentConfig (valores por defecto ← --config ←
línea de comandos), lo ejecuta y emite el reporte.

Códigos de salida: 0 éxito, 1 alguna verificación falló, 2 error de uso.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

# Agregar directorio raíz al path
root_dir = Path(__file__).parent.parent
sys.path.insert(0, str(root_dir))

from src import __app_name__, __version__  # noqa: E402
from src.core.experiment import COMMAND_DEFAULTS, run  # noqa: E402
from src.core.simplex import LinearProgramError  # noqa: E402
from src.models.experiment import ExperimentReport  # noqa: E402
from src.utils.config import build_config  # noqa: E402
from src.utils.constants import EXIT_USAGE  # noqa: E402
from src.utils.file_utils import write_text  # noqa: E402
from src.utils.json_utils import dumps, save_json  # noqa: E402
from src.utils.logger import level_from_flags, setup_logging  # noqa: E402
from src.utils.markdown_renderer import highlight_json, render_html, render_markdown  # noqa: E402

logger = logging.getLogger(__name__)

FURSTENBERG_ACTIONS = ("orbit", "code", "pair-corr", "charsum", "markov", "ineq3")

# Claves de argparse que no son parámetros del experimento
_CONTROL_KEYS = ("command", "action")


# ==================== PARSER ====================

def _common_parser() -> argparse.ArgumentParser:
    comun = argparse.ArgumentParser(add_help=False)
    grupo = comun.add_argument_group("opciones comunes")
    grupo.add_argument("--config", help="archivo JSON de configuración (la línea de comandos gana)")
    grupo.add_argument("--seed", type=int, help="semilla raíz (por defecto 0)")
    grupo.add_argument("--workers", type=int, help="hilos de trabajo (no cambia el resultado)")
    grupo.add_argument("--format", help="json | markdown | html")
    grupo.add_argument("--out", help="archivo del reporte (por defecto stdout)")
    grupo.add_argument("--csv", help="archivo CSV de la tabla principal")
    grupo.add_argument("-v", "--verbose", action="store_true", default=None, help="logs DEBUG")
    grupo.add_argument("-q", "--quiet", action="store_true", default=None, help="solo advertencias")
    grupo.add_argument("--log-file", help="copia de los logs en un archivo")
    return comun


def _oracle_parser() -> argparse.ArgumentParser:
    oraculo = argparse.ArgumentParser(add_help=False)
    grupo = oraculo.add_argument_group("oráculo de medida")
    grupo.add_argument("--oracle", help="bernoulli:p1,p2,... | furstenberg:k=..,alpha=..,window=a:b,"
                                        "samples=..,seed=..,sampler=iid|sobol | empirical:RUTA")
    grupo.add_argument("--bernoulli", help="atajo de --oracle bernoulli:p1,p2,...")
    grupo.add_argument("--confidence", type=float, help="nivel de los intervalos (por defecto 0.95)")
    return oraculo


def _skew_parser() -> argparse.ArgumentParser:
    skew = argparse.ArgumentParser(add_help=False)
    grupo = skew.add_argument_group("producto sesgado")
    grupo.add_argument("--k", type=int, help="los símbolos son 1..k+1 (por defecto 2)")
    grupo.add_argument("--alpha", type=float, help="rotación irracional (por defecto la razón áurea)")
    grupo.add_argument("--samples", type=int, help="puntos de Haar muestreados")
    grupo.add_argument("--sampler", help="iid | sobol")
    return skew


def _support_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--support", help="soporte Λ: 'a:b' o lista '0,3,7'")
    parser.add_argument("--base", help="palabra base x sobre Λ (símbolos 1-based); por defecto una aleatoria")


def build_parser() -> argparse.ArgumentParser:
    comun = _common_parser()
    oraculo = _oracle_parser()
    skew = _skew_parser()

    parser = argparse.ArgumentParser(
        prog=__app_name__,
        description="Medidas de bolas de Hamming, solucionador AT(n) y simulador del producto de Furstenberg",
    )
    parser.add_argument("--version", action="version", version=f"{__app_name__} {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMANDO")

    p = sub.add_parser("ball", parents=[comun, oraculo], help="medida de una bola de Hamming")
    p.add_argument("--word", help="palabra 'Λ=[n1,...]; W=[s1,...]' (símbolos 1-based)")
    p.add_argument("--eps", type=float, help="radio ε ∈ (0, 1)")

    p = sub.add_parser("bound", parents=[comun, oraculo], help="cota binomial de bolas para Bernoulli")
    p.add_argument("--m", type=int, help="longitud del bloque")
    p.add_argument("--eps", type=float, help="radio ε ∈ (0, 1)")
    p.add_argument("--r", type=float, help="máx p(i) si no se da el oráculo")
    p.add_argument("--n", type=int, help="n del umbral (1-ε)/(n·m)")
    p.add_argument("--m-max", type=int, help="recorre m = 1..m_max para el CSV")

    p = sub.add_parser("entropy", parents=[comun, oraculo], help="perfil de entropía por bloques")
    p.add_argument("--m-max", type=int, help="longitud máxima de bloque")

    p = sub.add_parser("atn-solve", parents=[comun, oraculo], help="resuelve la desigualdad AT(n)")
    p.add_argument("--n", type=int, help="número de generadores")
    p.add_argument("--n-max", type=int, help="perfil e*(1..n_max) en lugar de un solo n")
    p.add_argument("--targets", help="cylinders | planted")
    p.add_argument("--length", type=int, help="longitud de la ventana de los objetivos")
    p.add_argument("--count", type=int, help="número de objetivos")
    p.add_argument("--planted-n", type=int, help="rango de la instancia plantada")
    p.add_argument("--shifts", help="conjunto simétrico 𝒯, p. ej. --shifts=-1,0,1")
    p.add_argument("--max-shift", type=int, help="𝒯 = {-T..T}")
    p.add_argument("--generator-window", help="ventana 'a:b' de los generadores")
    p.add_argument("--max-iterations", type=int)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--lp-backend", help="simplex | highs")
    p.add_argument("--restarts", type=int)
    p.add_argument("--mass-normalized", action="store_true", default=None)
    p.add_argument("--trace", help="archivo JSON con las trazas del objetivo")

    p = sub.add_parser("furstenberg", help="simulador del producto sesgado")
    acciones = p.add_subparsers(dest="action", metavar="ACCIÓN")
    a = acciones.add_parser("orbit", parents=[comun, skew], help="órbita T^n(s, t)")
    a.add_argument("--s", type=float)
    a.add_argument("--t", type=float)
    a.add_argument("--from", type=int, help="primer n (|n| <= 10^6)")
    a.add_argument("--to", type=int, help="último n")
    a = acciones.add_parser("code", parents=[comun, skew], help="codificación y covarianza con R")
    a.add_argument("--s", type=float)
    a.add_argument("--t", type=float)
    a.add_argument("--window", help="ventana 'a:b'")
    a.add_argument("--points", type=int, help="puntos para la verificación de covarianza")
    a = acciones.add_parser("pair-corr", parents=[comun, skew], help="frecuencias de pares contra 1/q²")
    a.add_argument("--lags", help="rezagos: '1:10' o '1,2,5'")
    a = acciones.add_parser("charsum", parents=[comun, skew], help="sumas de caracteres y segundo momento")
    _support_args(a)
    a.add_argument("--word", help="palabra y sobre Λ (símbolos 1-based) para una suma puntual")
    a = acciones.add_parser("markov", parents=[comun, skew], help="cola de Markov de |S|")
    _support_args(a)
    a = acciones.add_parser("ineq3", parents=[comun, skew], help="masa de la bola pequeña y clases A_i")
    _support_args(a)

    p = sub.add_parser("check-thm21", parents=[comun, oraculo], help="condición necesaria para AT(n)")
    p.add_argument("--n", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--word", action="append", help="palabra Wⁱ (repetir n veces); sin ella se busca")
    p.add_argument("--budget", type=int, help="candidatos por par en la búsqueda")
    p.add_argument("--sizes", help="tamaños |Λⁱ| de la búsqueda")
    p.add_argument("--window", help="ventana 'a:b' donde buscar soportes")

    p = sub.add_parser("sample", parents=[comun, oraculo], help="guarda una medida empírica")
    p.add_argument("--window", help="ventana 'a:b'")
    p.add_argument("--samples", type=int, help="N_s")
    p.add_argument("--out-measure", help="archivo destino (.txt o .npz)")
    return parser


# ==================== SALIDA ====================

def _command_name(args: argparse.Namespace) -> str:
    if args.command == "furstenberg":
        return f"furstenberg.{args.action}"
    return args.command


def render_report(report: ExperimentReport, output_format: str) -> str:
    datos = report.to_dict()
    if output_format == "markdown":
        return render_markdown(datos)
    if output_format == "html":
        return render_html(datos)
    return dumps(datos) + "\n"


def emit(report: ExperimentReport, args: Dict[str, Optional[str]]) -> None:
    """Escribe el reporte, el CSV y la traza según las rutas pedidas."""
    texto = render_report(report, report.config.output_format)
    if args.get("out"):
        write_text(args["out"], texto)
        logger.info(f"📂 Reporte guardado: {args['out']}")
    elif report.config.output_format == "json" and sys.stdout.isatty():
        sys.stdout.write(highlight_json(texto))
    else:
        sys.stdout.write(texto)

    if args.get("csv"):
        if report.csv_text is None:
            logger.warning(f"⚠️ {report.config.command} no produce tabla CSV; se ignora --csv")
        else:
            write_text(args["csv"], report.csv_text)
            logger.info(f"📂 CSV guardado: {args['csv']}")
    if args.get("trace") and report.trace is not None:
        save_json(report.trace, args["trace"])


def main(argv: Optional[List[str]] = None) -> int:
    """Función principal; devuelve el código de salida."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None or (args.command == "furstenberg" and args.action is None):
        parser.print_help(sys.stderr)
        return EXIT_USAGE

    valores = {k: v for k, v in vars(args).items() if k not in _CONTROL_KEYS}
    setup_logging(level_from_flags(bool(valores.get("verbose")), bool(valores.get("quiet"))),
                  valores.get("log_file"))
    comando = _command_name(args)

    try:
        config = build_config(comando, valores, COMMAND_DEFAULTS[comando], valores.get("config"))
        report = run(config)
        emit(report, config.params)
    except ValueError as e:
        # ConfigError y los errores de dominio heredan de ValueError
        logger.debug("Detalle del error", exc_info=True)
        print(f"{__app_name__}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"{__app_name__}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except LinearProgramError as e:
        logger.error(f"❌ Programa lineal sin solución: {e}")
        print(f"{__app_name__}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
