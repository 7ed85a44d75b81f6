"""
Pruebas de persistencia de medidas empíricas
"""

import numpy as np
import pytest

from src.core.errors import MeasureFileError
from src.core.measure_store import MAGIC, load_empirical_measure, save_empirical_measure
from src.core.measures import EmpiricalMeasure


@pytest.fixture
def medida(rng):
    return EmpiricalMeasure((-2, 4), rng.integers(3, size=(25, 7)), 3, seed=11, source="prueba")


@pytest.mark.parametrize("nombre", ["medida.txt", "medida.npz"])
def test_guardar_y_cargar(tmp_path, medida, nombre):
    """Ambos formatos conservan ventana, alfabeto, semilla y muestras."""
    ruta = save_empirical_measure(medida, tmp_path / "sub" / nombre)
    cargada = load_empirical_measure(ruta)
    assert cargada.window == (-2, 4)
    assert cargada.k == 3
    assert cargada.seed == 11
    assert np.array_equal(cargada.samples, medida.samples)


def test_formato_texto_legible(tmp_path, medida):
    """El archivo de texto usa símbolos 1-based con cabecera."""
    ruta = save_empirical_measure(medida, tmp_path / "m.txt")
    lineas = ruta.read_text(encoding="utf-8").splitlines()
    assert lineas[0] == MAGIC
    assert lineas[1] == "# window=-2,4"
    assert lineas[5] == "".join(str(s + 1) for s in medida.samples[0])


def test_archivo_mal_formado_indica_linea(tmp_path, medida):
    """Un símbolo inválido reporta el número de línea."""
    ruta = save_empirical_measure(medida, tmp_path / "m.txt")
    lineas = ruta.read_text(encoding="utf-8").splitlines()
    lineas[7] = "1234567"
    ruta.write_text("\n".join(lineas) + "\n", encoding="utf-8")
    with pytest.raises(MeasureFileError) as info:
        load_empirical_measure(ruta)
    assert info.value.line == 8


def test_cabecera_invalida(tmp_path):
    """Sin la línea mágica el archivo se rechaza."""
    ruta = tmp_path / "x.txt"
    ruta.write_text("hola\n", encoding="utf-8")
    with pytest.raises(MeasureFileError):
        load_empirical_measure(ruta)


def test_archivo_inexistente(tmp_path):
    """Un archivo que no existe da FileNotFoundError."""
    with pytest.raises(FileNotFoundError):
        load_empirical_measure(tmp_path / "no-existe.txt")


def test_clave_de_cabecera_repetida(tmp_path, medida):
    """Una clave repetida se rechaza en su propia línea."""
    ruta = save_empirical_measure(medida, tmp_path / "m.txt")
    lineas = ruta.read_text(encoding="utf-8").splitlines()
    lineas.insert(2, "# window=-2,4")
    ruta.write_text("\n".join(lineas) + "\n", encoding="utf-8")
    with pytest.raises(MeasureFileError) as info:
        load_empirical_measure(ruta)
    assert info.value.line == 3
    assert "repetida" in str(info.value)


def test_lineas_de_cabecera_extra_no_desplazan_los_datos(tmp_path, medida):
    """Con una clave adicional en la cabecera los errores de datos siguen apuntando a su línea."""
    ruta = save_empirical_measure(medida, tmp_path / "m.txt")
    lineas = ruta.read_text(encoding="utf-8").splitlines()
    lineas.insert(5, "# source=prueba")
    lineas[9] = "12"
    ruta.write_text("\n".join(lineas) + "\n", encoding="utf-8")
    with pytest.raises(MeasureFileError) as info:
        load_empirical_measure(ruta)
    assert info.value.line == 10


def test_valor_de_cabecera_invalido_indica_su_linea(tmp_path, medida):
    """samples no numérico apunta a la línea de esa clave."""
    ruta = save_empirical_measure(medida, tmp_path / "m.txt")
    lineas = ruta.read_text(encoding="utf-8").splitlines()
    lineas[3] = "# samples=muchas"
    ruta.write_text("\n".join(lineas) + "\n", encoding="utf-8")
    with pytest.raises(MeasureFileError) as info:
        load_empirical_measure(ruta)
    assert info.value.line == 4
