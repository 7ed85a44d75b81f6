"""
Constantes globales de atn-lab

Todos los valores por defecto ajustables viven aquí para que la CLI,
los archivos de configuración y las pruebas compartan una sola fuente.
"""

import math

# ==================== PRESUPUESTOS ====================

# Máximo de bloques k^m que se enumeran para oráculos exactos
ENUMERATION_BUDGET = 10**7

# A partir de este número de muestras se consulta por mapas de conteo
RAW_SAMPLE_LIMIT = 10**6

# Soportes cuyo mapa de conteo se conserva (LRU)
COUNT_CACHE_SUPPORTS = 8

# Índice máximo |n| de órbita con aritmética compensada fiable
MAX_ORBIT_INDEX = 10**6

# Denominador máximo al leer un radio flotante como racional exacto
RATIONAL_DENOMINATOR_LIMIT = 10**9

# ==================== ESTADÍSTICA ====================

DEFAULT_CONFIDENCE = 0.95

# Confianza cuyo cuantil normal es exactamente 3 (regla de 3σ)
THREE_SIGMA_CONFIDENCE = math.erf(3 / math.sqrt(2))

# Por debajo de 10/N_s se usa el intervalo de Wilson
WILSON_THRESHOLD_COUNT = 10

# Muestras por bloque de RNG; fija las corrientes aleatorias
SAMPLING_BLOCK_SIZE = 1 << 16

# ==================== FURSTENBERG ====================

# Parte fraccionaria de la razón áurea
GOLDEN_ALPHA = (math.sqrt(5) - 1) / 2

DEFAULT_SKEW_K = 2

# ==================== RESOLVEDOR AT(n) ====================

SIMPLEX_TOLERANCE = 1e-10
SIMPLEX_MAX_PIVOTS = 50_000
DEFAULT_MAX_ITERATIONS = 50
DEFAULT_STOP_TOLERANCE = 1e-7
DEFAULT_RESTARTS = 3
LP_BACKENDS = ("simplex", "highs")

# ==================== CLI ====================

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

CSV_ENTROPY_COLUMNS = [
    "m",
    "H_m",
    "H_m/m",
    "H_m - H_{m-1}",
    "distinct_blocks",
    "samples",
    "H_m_miller_madow",
    "H_m_bits",
]
