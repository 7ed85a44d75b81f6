"""
Renderizado de reportes

- Markdown: encabezado, configuración, verificaciones y payload
- HTML: el mismo Markdown pasado por python-markdown
- JSON resaltado con Pygments cuando la salida es una terminal
"""

from typing import Any, Dict, List

import markdown
from pygments import highlight
from pygments.formatters import TerminalFormatter
from pygments.lexers import JsonLexer

from .json_utils import dumps

HTML_TEMPLATE = """<!DOCTYPE html>
<html lang="es">
<head>
<meta charset="utf-8">
<title>{title}</title>
<style>
body {{ font-family: sans-serif; max-width: 60em; margin: 2em auto; }}
table {{ border-collapse: collapse; }}
th, td {{ border: 1px solid #999; padding: 0.2em 0.6em; }}
pre {{ background: #f4f4f4; padding: 1em; overflow-x: auto; }}
</style>
</head>
<body>
{body}
</body>
</html>
"""


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, bool):
        return "✅" if value else "❌"
    return str(value).replace("|", "\\|")


def markdown_table(rows: List[Dict[str, Any]], columns: List[str] | None = None) -> str:
    """Tabla Markdown a partir de una lista de diccionarios."""
    if not rows:
        return "_(sin filas)_"
    columns = columns or list(rows[0].keys())
    lineas = [
        "| " + " | ".join(columns) + " |",
        "|" + "|".join("---" for _ in columns) + "|",
    ]
    for row in rows:
        lineas.append("| " + " | ".join(_cell(row.get(c, "")) for c in columns) + " |")
    return "\n".join(lineas)


def render_markdown(report: Dict[str, Any]) -> str:
    """
    Genera el reporte en Markdown.

    Args:
        report: Salida de ExperimentReport.to_dict()

    Returns:
        str: Documento Markdown
    """
    config = report.get("config", {})
    estado = "✅ pass" if report.get("pass", True) else "❌ fail"
    lineas = [
        f"# atn-lab · {config.get('command', '')}\n",
        f"**Herramienta:** {report.get('tool', '')}  ",
        f"**Resultado:** {estado}  ",
    ]
    if "wall_time_s" in report:
        lineas.append(f"**Tiempo:** {report['wall_time_s']:.3f} s")
    lineas.append("")

    parametros = config.get("params", {})
    if parametros:
        lineas.append("## Configuración\n")
        lineas.append(markdown_table([{"parámetro": k, "valor": v} for k, v in parametros.items()]))
        lineas.append("")

    checks = report.get("checks", [])
    if checks:
        lineas.append("## Verificaciones\n")
        filas = [{k: c.get(k, "") for k in ("name", "statistic", "bound", "sigma", "pass")} for c in checks]
        lineas.append(markdown_table(filas))
        lineas.append("")

    lineas.append("## Resultados\n")
    lineas.append("```json")
    lineas.append(dumps(report.get("payload", {})))
    lineas.append("```")
    return "\n".join(lineas) + "\n"


def render_html(report: Dict[str, Any]) -> str:
    """Reporte como página HTML autocontenida."""
    cuerpo = markdown.markdown(render_markdown(report), extensions=["tables", "fenced_code"])
    titulo = f"atn-lab · {report.get('config', {}).get('command', '')}"
    return HTML_TEMPLATE.format(title=titulo, body=cuerpo)


def highlight_json(text: str) -> str:
    """JSON coloreado para terminal."""
    return highlight(text, JsonLexer(), TerminalFormatter())
