"""
Pruebas de extremo a extremo de la CLI
"""

import json

import pytest

from src.core.simplex import LinearProgramError
from src.main import main

PALABRA = "Λ=[0,1,2,3]; W=[1,2,1,1]"


def _json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


# ==================== BOLA Y CONFIGURACIÓN ====================

def test_bola_bernoulli(capsys):
    """Moneda justa, W=[1,2,1,1], ε=0.3: medida 5/16."""
    codigo = main(["ball", "--bernoulli", "0.5,0.5", "--word", PALABRA, "--eps", "0.3"])
    assert codigo == 0
    reporte = _json(capsys)
    assert reporte["payload"]["ball"]["estimate"] == pytest.approx(0.3125)
    assert reporte["payload"]["k_max"] == 1
    assert reporte["pass"] is True
    assert "wall_time_s" in reporte


def test_archivo_de_configuracion_y_precedencia(tmp_path, capsys):
    """El archivo aporta valores; la línea de comandos gana."""
    config = tmp_path / "ball.json"
    config.write_text(json.dumps({"command": "ball", "bernoulli": "0.5,0.5", "word": PALABRA, "eps": 0.1}),
                      encoding="utf-8")
    assert main(["ball", "--config", str(config), "--eps", "0.3"]) == 0
    reporte = _json(capsys)
    assert reporte["payload"]["eps"] == 0.3
    assert reporte["payload"]["ball"]["estimate"] == pytest.approx(0.3125)


def test_json_invalido_indica_linea(tmp_path, capsys):
    """Un JSON mal formado sale con código 2 y 'ruta:línea'."""
    config = tmp_path / "roto.json"
    config.write_text('{\n  "eps": 0.3,\n}\n', encoding="utf-8")
    assert main(["ball", "--config", str(config)]) == 2
    assert f"{config}:3" in capsys.readouterr().err


def test_valor_invalido_en_archivo_indica_linea(tmp_path, capsys):
    """ε fuera de rango en el archivo apunta a su línea."""
    config = tmp_path / "ball.json"
    config.write_text('{\n  "bernoulli": "0.5,0.5",\n  "eps": 2\n}\n', encoding="utf-8")
    assert main(["ball", "--config", str(config), "--word", PALABRA]) == 2
    assert f"{config}:3" in capsys.readouterr().err


@pytest.mark.parametrize("argumentos", [
    ["ball", "--bernoulli", "0.5,0.5", "--word", PALABRA, "--eps", "1.5"],
    ["ball", "--bernoulli", "0.5,0", "--word", PALABRA, "--eps", "0.3"],
    ["ball", "--oracle", "poisson:1", "--word", PALABRA, "--eps", "0.3"],
    ["ball", "--bernoulli", "0.5,0.5", "--eps", "0.3"],
    ["ball", "--bernoulli", "0.5,0.5", "--word", PALABRA, "--eps", "0.3", "--format", "xml"],
    ["check-thm21", "--oracle", "empirical:/no/existe.txt", "--sizes", "3"],
])
def test_errores_de_uso(argumentos, capsys):
    """Entradas inválidas terminan con código 2 antes de calcular."""
    assert main(argumentos) == 2
    assert "atn-lab: error:" in capsys.readouterr().err


def test_sin_subcomando():
    """Sin subcomando se imprime la ayuda y se sale con 2."""
    assert main([]) == 2
    assert main(["furstenberg"]) == 2


# ==================== REPRODUCIBILIDAD Y FORMATOS ====================

def test_misma_semilla_mismo_payload(capsys):
    """Misma configuración y semilla: payload idéntico con cualquier número de hilos."""
    argumentos = ["entropy", "--oracle", "furstenberg:k=2,window=0:5,samples=5000,seed=3", "--m-max", "4"]
    assert main(argumentos) == 0
    primero = _json(capsys)
    assert main(argumentos + ["--workers", "3"]) == 0
    segundo = _json(capsys)
    assert primero["payload"] == segundo["payload"]
    assert primero["checks"] == segundo["checks"]


def test_formatos_markdown_y_html(tmp_path, capsys):
    """Markdown a stdout y HTML a archivo."""
    base = ["ball", "--bernoulli", "0.5,0.5", "--word", PALABRA, "--eps", "0.3"]
    assert main(base + ["--format", "markdown"]) == 0
    texto = capsys.readouterr().out
    assert texto.startswith("# atn-lab · ball")
    assert "```json" in texto

    salida = tmp_path / "reporte.html"
    assert main(base + ["--format", "html", "--out", str(salida)]) == 0
    html = salida.read_text(encoding="utf-8")
    assert html.startswith("<!DOCTYPE html>")
    assert "<h1>" in html


def test_cota_con_csv(tmp_path, capsys):
    """bound escribe una fila por m = 1..m_max y verifica la bola exacta."""
    csv = tmp_path / "cota.csv"
    codigo = main(["bound", "--bernoulli", "0.5,0.5", "--m", "10", "--eps", "0.1", "--m-max", "5",
                   "--csv", str(csv)])
    assert codigo == 0
    reporte = _json(capsys)
    assert reporte["checks"][0]["name"] == "binomial_bound"
    lineas = csv.read_text(encoding="utf-8").strip().splitlines()
    assert lineas[0] == "m,binomial_bound,small_ball_threshold,below"
    assert len(lineas) == 6


# ==================== FLUJOS COMPLETOS ====================

def test_muestra_y_verifica_condicion(tmp_path, capsys):
    """sample guarda una medida y check-thm21 la usa como oráculo."""
    medida = tmp_path / "medida.txt"
    assert main(["sample", "--bernoulli", "0.5,0.5", "--window", "0:19", "--samples", "2000",
                 "--out-measure", str(medida), "--seed", "1"]) == 0
    assert _json(capsys)["payload"]["measure"]["samples"] == 2000
    assert medida.exists()

    codigo = main(["check-thm21", "--oracle", f"empirical:{medida}", "--n", "2", "--eps", "0.1",
                   "--delta", "0.1", "--budget", "5", "--sizes", "10"])
    reporte = _json(capsys)
    assert codigo == 1
    assert reporte["checks"][0]["name"] == "necessary_condition"
    assert reporte["payload"]["evidence"]["verdict"] == "condition violated at this resolution"


def test_orbita(capsys):
    """furstenberg orbit lista T^n(s, t) y compara con la iteración."""
    assert main(["furstenberg", "orbit", "--s", "0.1", "--t", "0.2", "--from", "0", "--to", "5"]) == 0
    reporte = _json(capsys)
    orbita = reporte["payload"]["orbit"]
    assert [fila["n"] for fila in orbita] == list(range(6))
    assert orbita[0]["s"] == pytest.approx(0.1)
    assert all(1 <= fila["symbol"] <= 3 for fila in orbita)
    assert reporte["checks"][0]["pass"] is True


def test_atn_con_traslaciones_negativas(tmp_path, capsys):
    """--shifts=-1,0,1 se acepta y la traza queda en su archivo."""
    traza = tmp_path / "traza.json"
    codigo = main(["atn-solve", "--bernoulli", "0.5,0.5", "--n", "1", "--shifts=-1,0,1", "--length", "2",
                   "--max-iterations", "5", "--trace", str(traza)])
    assert codigo == 0
    reporte = _json(capsys)
    assert reporte["payload"]["params"]["shifts"] == [-1, 0, 1]
    assert json.loads(traza.read_text(encoding="utf-8"))[0]["n"] == 1


def test_lp_sin_solucion_sale_con_error_de_uso(monkeypatch, capsys):
    """Un LP que agota sus pivotes termina con código 2 y un mensaje, sin traza de Python."""
    def agotado(*args, **kwargs):
        raise LinearProgramError("se agotó el presupuesto de pivotes")

    monkeypatch.setattr("src.core.atn_solver.solve_lp", agotado)
    codigo = main(["atn-solve", "--bernoulli", "0.5,0.5", "--n", "1", "--length", "2", "--max-iterations", "3"])
    assert codigo == 2
    assert "presupuesto de pivotes" in capsys.readouterr().err


@pytest.mark.parametrize("comando", [
    ["ball", "--eps", "0.3", "--word", "Λ=[0,1]; W=[1]"],
    ["ball", "--eps", "0.3", "--word", "Λ=[0,40]; W=[1,1]"],
    ["check-thm21", "--n", "1", "--word", "Λ=[0,1]; W=[1,9]"],
])
def test_palabra_invalida_se_rechaza_antes_de_muestrear(monkeypatch, capsys, comando):
    """Con un oráculo Furstenberg la palabra se valida antes de muestrear."""
    llamadas = []

    def muestrear(*args, **kwargs):
        llamadas.append(args)
        raise AssertionError("no debía muestrear")

    monkeypatch.setattr("src.core.furstenberg.sample_coded_measure", muestrear)
    assert main(comando + ["--oracle", "furstenberg:k=2,window=0:9,samples=1000"]) == 2
    assert llamadas == []
    assert "atn-lab: error:" in capsys.readouterr().err
