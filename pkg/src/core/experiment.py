"""
Ejecutor de experimentos

run(config) valida los parámetros de la operación, despacha al módulo
correspondiente y arma el ExperimentReport. El payload solo depende de
la configuración y la semilla; el tiempo de reloj va aparte.
"""

import logging
import subprocess
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .. import __app_name__, __version__
from ..models.atn import AtnProblem, SolverParams, defect_rows
from ..models.experiment import ExperimentConfig, ExperimentReport
from ..models.probability import ProbabilityVector
from ..models.symbolic import FunnyWord, Support
from ..models.torus import SkewParams, TorusPoint
from ..models.witness import Theorem21Instance
from ..utils.config import (
    parse_int_list,
    parse_key_values,
    parse_window,
    require_choice,
    require_float,
    require_int,
    validate_output,
)
from ..utils.constants import GOLDEN_ALPHA, LP_BACKENDS, MAX_ORBIT_INDEX
from ..utils.file_utils import rows_to_csv
from ..utils.rng import block_rng, sample_blocks
from . import atn_solver, entropy, furstenberg, measures, witness
from .measure_store import load_empirical_measure, save_empirical_measure
from .symbolic_core import strict_radius_count

logger = logging.getLogger(__name__)

ORACLE_KINDS = ("bernoulli", "furstenberg", "empirical")

# Valores por defecto por subcomando (los comunes viven en utils.config)
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "ball": {},
    "bound": {"n": 1},
    "entropy": {"m_max": 8},
    "atn-solve": {
        "n": 1,
        "targets": "cylinders",
        "length": 2,
        "max_shift": 1,
        "max_iterations": 50,
        "tolerance": 1e-7,
        "lp_backend": "simplex",
        "restarts": 3,
        "mass_normalized": False,
    },
    "check-thm21": {"n": 2, "eps": 0.1, "delta": 0.1, "budget": 20},
    "sample": {"window": "0:9", "samples": 10000},
}
_SKEW_DEFAULTS = {"k": 2, "alpha": GOLDEN_ALPHA, "samples": 100000, "sampler": "iid"}
COMMAND_DEFAULTS.update({
    "furstenberg.orbit": {**_SKEW_DEFAULTS, "s": 0.1, "t": 0.2, "from": 0, "to": 20},
    "furstenberg.code": {**_SKEW_DEFAULTS, "s": 0.1, "t": 0.2, "window": "0:49", "points": 1000},
    "furstenberg.pair-corr": {**_SKEW_DEFAULTS, "lags": "1:10"},
    "furstenberg.charsum": {**_SKEW_DEFAULTS, "support": "0:29"},
    "furstenberg.markov": {**_SKEW_DEFAULTS, "support": "0:29"},
    "furstenberg.ineq3": {**_SKEW_DEFAULTS, "support": "0:29"},
})


@dataclass
class Outcome:
    """Lo que devuelve cada manejador."""

    payload: Dict[str, Any]
    checks: List[Dict[str, Any]] = field(default_factory=list)
    csv_text: Optional[str] = None
    trace: Optional[List[Any]] = None


def tool_version() -> str:
    """'atn-lab X.Y.Z' más 'git describe' si hay un checkout de git."""
    version = f"{__app_name__} {__version__}"
    raiz = Path(__file__).resolve().parent.parent.parent
    if not (raiz / ".git").exists():
        return version
    try:
        salida = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=raiz, capture_output=True, text=True, timeout=5, check=True,
        )
    except (OSError, subprocess.SubprocessError):
        return version
    descripcion = salida.stdout.strip()
    return f"{version} ({descripcion})" if descripcion else version


# ==================== ORÁCULOS ====================

def parse_oracle(cfg: ExperimentConfig) -> Tuple[str, Dict[str, Any]]:
    """
    Valida --oracle / --bernoulli sin calcular nada.

    Formatos:
        bernoulli:0.2,0.8
        furstenberg:k=2,alpha=0.618,window=0:9,samples=100000,seed=7,sampler=iid
        empirical:RUTA
    """
    texto = cfg.get("oracle")
    if cfg.has("bernoulli"):
        if texto is not None:
            raise cfg.error("bernoulli", "usa --oracle o --bernoulli, no ambos")
        valor = cfg.get("bernoulli")
        texto = "bernoulli:" + (",".join(str(v) for v in valor) if isinstance(valor, list) else str(valor))
        key = "bernoulli"
    else:
        key = "oracle"
    if texto is None:
        raise cfg.error("oracle", "se requiere --oracle o --bernoulli")

    tipo, _, resto = str(texto).partition(":")
    if tipo not in ORACLE_KINDS:
        raise cfg.error(key, f"tipo de oráculo desconocido {tipo!r} (opciones: {', '.join(ORACLE_KINDS)})")
    if tipo == "bernoulli":
        try:
            return tipo, {"p": ProbabilityVector.parse(resto)}
        except ValueError as e:
            raise cfg.error(key, str(e)) from None
    if tipo == "empirical":
        if not resto:
            raise cfg.error(key, "falta la ruta del archivo (empirical:RUTA)")
        return tipo, {"path": resto}

    pares = parse_key_values(cfg, key, resto)
    desconocidas = set(pares) - {"k", "alpha", "window", "samples", "seed", "sampler"}
    if desconocidas:
        raise cfg.error(key, f"claves desconocidas: {', '.join(sorted(desconocidas))}")
    try:
        params = SkewParams(float(pares.get("alpha", GOLDEN_ALPHA)), int(pares.get("k", 2)))
        a, b = (int(v) for v in pares.get("window", "0:9").split(":"))
        muestras = int(pares.get("samples", 100000))
        semilla = int(pares.get("seed", cfg.seed))
    except ValueError as e:
        raise cfg.error(key, f"especificación furstenberg inválida: {e}") from None
    muestreador = pares.get("sampler", "iid")
    if b < a or muestras < 1 or semilla < 0 or muestreador not in furstenberg.SAMPLERS:
        raise cfg.error(key, "ventana, samples, seed o sampler fuera de rango")
    return tipo, {"params": params, "window": (a, b), "samples": muestras, "seed": semilla, "sampler": muestreador}


def build_oracle(kind: str, opciones: Dict[str, Any], workers: int = 1) -> measures.MeasureOracle:
    if kind == "bernoulli":
        return measures.BernoulliMeasure(opciones["p"])
    if kind == "empirical":
        return load_empirical_measure(opciones["path"])
    return furstenberg.sample_coded_measure(opciones["params"], opciones["window"], opciones["samples"],
                                            opciones["seed"], opciones["sampler"], workers)


def _oracle_alphabet(kind: str, opciones: Dict[str, Any]) -> Optional[int]:
    if kind == "bernoulli":
        return opciones["p"].k
    if kind == "furstenberg":
        return opciones["params"].symbols
    return None


def _parse_word(cfg: ExperimentConfig, key: str, text: str, k: int) -> FunnyWord:
    try:
        return FunnyWord.from_text(text, k)
    except ValueError as e:
        raise cfg.error(key, str(e)) from None


def _parse_words_early(cfg: ExperimentConfig, kind: str, opciones: Dict[str, Any],
                        textos: List[str]) -> Optional[List[FunnyWord]]:
    """
    Palabras validadas antes de construir el oráculo cuando el alfabeto ya
    se conoce (Bernoulli, Furstenberg); None para medidas empíricas.
    """
    k = _oracle_alphabet(kind, opciones)
    if k is None:
        return None
    palabras = [_parse_word(cfg, "word", texto, k) for texto in textos]
    if kind == "furstenberg":
        a, b = opciones["window"]
        for palabra in palabras:
            if not palabra.support.within(a, b):
                raise cfg.error("word", f"{palabra.support} no cabe en la ventana muestreada [{a}, {b}]")
    return palabras


def _skew_params(cfg: ExperimentConfig) -> SkewParams:
    k = require_int(cfg, "k", minimum=2, maximum=255)
    alpha = require_float(cfg, "alpha", 0.0, 1.0)
    try:
        return SkewParams(alpha, k)
    except ValueError as e:
        raise cfg.error("alpha", str(e)) from None


def _check(report) -> Dict[str, Any]:
    return report.to_dict()


# ==================== MANEJADORES ====================

def _run_ball(cfg: ExperimentConfig) -> Outcome:
    kind, opciones = parse_oracle(cfg)
    eps = require_float(cfg, "eps", 0.0, 1.0)
    confidence = require_float(cfg, "confidence", 0.0, 1.0)
    if not cfg.has("word"):
        raise cfg.error("word", "se requiere --word 'Λ=[...]; W=[...]'")
    tempranas = _parse_words_early(cfg, kind, opciones, [cfg.get("word")])
    oracle = build_oracle(kind, opciones, cfg.workers)
    word = tempranas[0] if tempranas else _parse_word(cfg, "word", cfg.get("word"), oracle.k)

    if isinstance(oracle, measures.EmpiricalMeasure):
        bola = measures.ball_measure_empirical(oracle, word, eps, confidence, workers=cfg.workers)
    else:
        bola = oracle.ball_measure(word, eps, confidence)
    payload = {
        "oracle": oracle.describe(),
        "word": word.to_text(),
        "eps": eps,
        "k_max": strict_radius_count(eps, len(word)),
        "ball": bola.to_dict(),
        "cylinder": oracle.cylinder_measure(word),
    }
    return Outcome(payload)


def _run_bound(cfg: ExperimentConfig) -> Outcome:
    m = require_int(cfg, "m", minimum=1)
    eps = require_float(cfg, "eps", 0.0, 1.0)
    n = require_int(cfg, "n", minimum=1)
    m_max = require_int(cfg, "m_max", minimum=1) if cfg.has("m_max") else m
    p = None
    if cfg.has("bernoulli") or cfg.has("oracle"):
        kind, opciones = parse_oracle(cfg)
        if kind != "bernoulli":
            raise cfg.error("oracle", "bound solo admite oráculos bernoulli")
        p = opciones["p"]
        r = p.max
    else:
        r = require_float(cfg, "r", 0.0, 1.0)

    cota = measures.ball_measure_binomial_bound(m, eps, r)
    umbral = measures.small_ball_threshold(m, eps, n)
    payload = {
        "m": m,
        "eps": eps,
        "r": r,
        "n": n,
        "binomial_bound": cota,
        "stirling_ratio": measures.stirling_ratio(eps, r),
        "stirling_chain_bound": measures.stirling_chain_bound(m, eps, r),
        "small_ball_threshold": umbral,
        "below_threshold": cota < umbral,
        "minimal_block_length": measures.minimal_block_length(eps, r, n, m_max),
    }
    checks = []
    if p is not None:
        simbolo = int(np.argmax(p.as_array()))
        palabra = FunnyWord(Support.interval(0, m - 1), (simbolo,) * m, p.k)
        exacta = measures.ball_measure_bernoulli_exact(p, palabra, eps)
        payload["exact_ball"] = exacta
        checks.append({"name": "binomial_bound", "statistic": exacta, "bound": cota, "sigma": 0.0,
                       "pass": exacta <= cota * (1 + 1e-12) + 1e-300})
    filas = [{"m": j, "binomial_bound": measures.ball_measure_binomial_bound(j, eps, r),
              "small_ball_threshold": measures.small_ball_threshold(j, eps, n)} for j in range(1, m_max + 1)]
    for fila in filas:
        fila["below"] = fila["binomial_bound"] < fila["small_ball_threshold"]
    return Outcome(payload, checks, rows_to_csv(filas))


def _run_entropy(cfg: ExperimentConfig) -> Outcome:
    kind, opciones = parse_oracle(cfg)
    m_max = require_int(cfg, "m_max", minimum=1)
    oracle = build_oracle(kind, opciones, cfg.workers)
    perfil = entropy.entropy_profile(oracle, m_max)
    payload = {"oracle": oracle.describe(), "profile": perfil.to_dict()}
    checks = []
    if isinstance(oracle, measures.BernoulliMeasure):
        exacta = entropy.bernoulli_entropy_exact(oracle.p)
        desviacion = max(abs(rate - exacta) for rate in perfil.rates)
        payload["exact_rate"] = exacta
        checks.append({"name": "bernoulli_rate", "statistic": desviacion, "bound": 1e-9, "sigma": 0.0,
                       "pass": desviacion < 1e-9})
    else:
        tasas = perfil.rates
        payload["rates_strictly_decreasing"] = all(b < a for a, b in zip(tasas[1:], tasas[2:]))
    return Outcome(payload, checks, entropy.write_profile_csv(perfil))


def _targets(cfg: ExperimentConfig, oracle, shifts, n: int, seed: int):
    tipo = require_choice(cfg, "targets", ("cylinders", "planted"))
    length = require_int(cfg, "length", minimum=1, maximum=12)
    count = require_int(cfg, "count", minimum=1) if cfg.has("count") else n + 1
    # Las ventanas trasladadas deben caber en la ventana muestreada
    inicio = 0
    if isinstance(oracle, measures.EmpiricalMeasure):
        margen = max(abs(t) for t in shifts)
        inicio = oracle.window[0] + margen
        if inicio + length - 1 + margen > oracle.window[1]:
            raise cfg.error("length", f"la ventana {oracle.window} no admite length={length} con |t| <= {margen}")
    if tipo == "cylinders":
        return atn_solver.cylinder_indicator_targets(oracle, length, count, inicio), None
    plantados = require_int(cfg, "planted_n", minimum=1) if cfg.has("planted_n") else n
    if count < plantados:
        raise cfg.error("count", f"debe ser >= planted_n ({plantados})")
    ventana = (inicio, inicio + length - 1)
    return atn_solver.planted_instance(oracle, ventana, plantados, count, shifts, seed)


def _run_atn_solve(cfg: ExperimentConfig) -> Outcome:
    kind, opciones = parse_oracle(cfg)
    n = require_int(cfg, "n", minimum=1, maximum=64)
    n_max = require_int(cfg, "n_max", minimum=1, maximum=64) if cfg.has("n_max") else None
    if cfg.has("shifts"):
        shifts = parse_int_list(cfg, "shifts")
    else:
        t = require_int(cfg, "max_shift", minimum=0)
        shifts = list(range(-t, t + 1))
    try:
        params = SolverParams(
            shifts=tuple(shifts),
            generator_window=parse_window(cfg, "generator_window") if cfg.has("generator_window") else None,
            max_iterations=require_int(cfg, "max_iterations", minimum=0),
            tolerance=require_float(cfg, "tolerance", 0.0, None, open_interval=False),
            mass_normalized=bool(cfg.get("mass_normalized", False)),
            lp_backend=require_choice(cfg, "lp_backend", LP_BACKENDS),
            restarts=require_int(cfg, "restarts", minimum=0),
            workers=cfg.workers,
        )
    except ValueError as e:
        raise cfg.error("shifts", str(e)) from None
    oracle = build_oracle(kind, opciones, cfg.workers)
    objetivos, plantados = _targets(cfg, oracle, params.shifts, n_max or n, cfg.seed)

    payload: Dict[str, Any] = {
        "oracle": oracle.describe(),
        "window": list(objetivos[0].window),
        "targets": len(objetivos),
        "params": params.to_dict(),
    }
    checks = []
    if n_max is None:
        testigo = atn_solver.alternate_optimize(AtnProblem(oracle, objetivos, n, params), cfg.seed)
        perfil = [testigo]
        payload["witness"] = testigo.to_dict()
    else:
        perfil = atn_solver.defect_profile(oracle, objetivos, n_max, params, cfg.seed)
        payload["profile"] = atn_solver.profile_summary(perfil)
        payload["witnesses"] = [w.to_dict() for w in perfil]
        errores = [w.max_error for w in perfil]
        checks.append({"name": "profile_monotone", "statistic": max(np.diff(errores), default=0.0),
                       "bound": 0.0, "sigma": 0.0, "pass": all(b <= a for a, b in zip(errores, errores[1:]))})
    if plantados is not None:
        payload["planted_generators"] = [g.to_dict() for g in plantados]

    monotona = all(all(b <= a for a, b in zip(w.trace, w.trace[1:])) for w in perfil)
    checks.append({"name": "trace_monotone", "statistic": float(perfil[-1].max_error), "bound": 0.0,
                   "sigma": 0.0, "pass": monotona})
    filas = defect_rows(perfil)
    traza = [{"n": w.n, "trace": list(w.trace)} for w in perfil]
    return Outcome(payload, checks, rows_to_csv(filas), traza)


def _run_orbit(cfg: ExperimentConfig) -> Outcome:
    params = _skew_params(cfg)
    z = TorusPoint(require_float(cfg, "s"), require_float(cfg, "t"))
    desde = require_int(cfg, "from", minimum=-MAX_ORBIT_INDEX, maximum=MAX_ORBIT_INDEX)
    hasta = require_int(cfg, "to", minimum=desde, maximum=MAX_ORBIT_INDEX)
    puntos = furstenberg.skew_orbit(z, params, desde, hasta)
    simbolos = furstenberg.strip_index(np.array([p.t for p in puntos]), params)
    filas = [{"n": n, "s": p.s, "t": p.t, "symbol": int(c) + 1}
             for n, p, c in zip(range(desde, hasta + 1), puntos, simbolos)]
    payload = {"params": params.to_dict(), "start": list(z.as_tuple()), "orbit": filas}
    checks = []
    if hasta > 0:
        pasos = min(hasta, 1000)
        desviacion = furstenberg.orbit_consistency(z, params, pasos)
        checks.append({"name": "closed_form_vs_iteration", "statistic": desviacion, "bound": 1e-9,
                       "sigma": 0.0, "pass": desviacion < 1e-9, "details": {"steps": pasos}})
    return Outcome(payload, checks, rows_to_csv(filas))


def _run_code(cfg: ExperimentConfig) -> Outcome:
    params = _skew_params(cfg)
    z = TorusPoint(require_float(cfg, "s"), require_float(cfg, "t"))
    window = parse_window(cfg, "window")
    puntos = require_int(cfg, "points", minimum=1)
    palabra = furstenberg.code_point(z, params, window)
    rotada = furstenberg.code_point(furstenberg.rotate(z, params), params, window)
    payload = {"params": params.to_dict(), "point": list(z.as_tuple()), "word": palabra.to_text(),
               "rotated_word": rotada.to_text()}
    chequeo = furstenberg.rotation_covariance_check(params, window, puntos, cfg.seed)
    return Outcome(payload, [_check(chequeo)])


def _run_pair_corr(cfg: ExperimentConfig) -> Outcome:
    params = _skew_params(cfg)
    lags = parse_int_list(cfg, "lags")
    if min(lags) < 1:
        raise cfg.error("lags", "los rezagos deben ser >= 1")
    samples = require_int(cfg, "samples", minimum=1)
    sampler = require_choice(cfg, "sampler", furstenberg.SAMPLERS)
    reporte = furstenberg.pair_correlations(params, lags, samples, cfg.seed, sampler, cfg.workers)
    filas = reporte.details["rows"]
    return Outcome({"params": params.to_dict(), "pair_correlations": reporte.to_dict()}, [_check(reporte)],
                   rows_to_csv(filas, ["lag", "i", "j", "frequency", "expected", "sigma", "pass"]))


def _support_and_base(cfg: ExperimentConfig, params: SkewParams) -> Tuple[Support, Optional[FunnyWord]]:
    try:
        soporte = Support.from_iterable(parse_int_list(cfg, "support"))
    except ValueError as e:
        raise cfg.error("support", str(e)) from None
    if abs(soporte.start) > MAX_ORBIT_INDEX or abs(soporte.stop) > MAX_ORBIT_INDEX:
        raise cfg.error("support", f"los índices deben cumplir |n| <= {MAX_ORBIT_INDEX}")
    if not cfg.has("base"):
        return soporte, None
    simbolos = parse_int_list(cfg, "base")
    try:
        return soporte, FunnyWord.from_one_based(list(soporte), simbolos, params.symbols)
    except ValueError as e:
        raise cfg.error("base", str(e)) from None


def _skew_sampling(cfg: ExperimentConfig) -> Tuple[SkewParams, Support, Optional[FunnyWord], int, str]:
    params = _skew_params(cfg)
    soporte, base = _support_and_base(cfg, params)
    samples = require_int(cfg, "samples", minimum=1)
    sampler = require_choice(cfg, "sampler", furstenberg.SAMPLERS)
    return params, soporte, base, samples, sampler


def _run_charsum(cfg: ExperimentConfig) -> Outcome:
    params, soporte, base, samples, sampler = _skew_sampling(cfg)
    payload: Dict[str, Any] = {"params": params.to_dict(), "support": str(soporte)}
    if cfg.has("word"):
        if base is None:
            raise cfg.error("word", "--word requiere --base")
        y = FunnyWord.from_one_based(list(soporte), parse_int_list(cfg, "word"), params.symbols)
        payload["character_sum"] = furstenberg.character_sum(y, base).to_dict()
    segundo = furstenberg.second_moment_check(params, soporte, base, samples, cfg.seed, sampler, cfg.workers)
    bola = furstenberg.ball_implication_check(params, soporte, base, samples, cfg.seed, sampler, cfg.workers)
    return Outcome(payload, [_check(segundo), _check(bola)])


def _run_markov(cfg: ExperimentConfig) -> Outcome:
    params, soporte, base, samples, sampler = _skew_sampling(cfg)
    reporte = furstenberg.markov_tail_check(params, soporte, base, samples, cfg.seed, sampler, cfg.workers)
    return Outcome({"params": params.to_dict(), "support": str(soporte)}, [_check(reporte)])


def _run_ineq3(cfg: ExperimentConfig) -> Outcome:
    params, soporte, base, samples, sampler = _skew_sampling(cfg)
    reporte = furstenberg.ineq3_check(params, soporte, base, samples, cfg.seed, sampler, cfg.workers)
    clases = furstenberg.rotation_class_check(params, soporte, base, samples, cfg.seed, sampler, cfg.workers)
    return Outcome({"params": params.to_dict(), "support": str(soporte)}, [_check(reporte), _check(clases)])


def _run_check_thm21(cfg: ExperimentConfig) -> Outcome:
    kind, opciones = parse_oracle(cfg)
    n = require_int(cfg, "n", minimum=1)
    eps = require_float(cfg, "eps", 0.0, 1.0)
    delta = require_float(cfg, "delta", 0.0, 1.0)
    confidence = require_float(cfg, "confidence", 0.0, 1.0)
    palabras = cfg.get("word")
    if palabras is not None and not isinstance(palabras, list):
        palabras = [palabras]
    if palabras is None:
        budget = require_int(cfg, "budget", minimum=1)
        tamanos = parse_int_list(cfg, "sizes") if cfg.has("sizes") else None
        if tamanos is not None and len(tamanos) == 1:
            tamanos = tamanos * n
        if tamanos is not None and (len(tamanos) != n or min(tamanos) < 1):
            raise cfg.error("sizes", f"se esperaban {n} tamaños positivos")
        window = parse_window(cfg, "window") if cfg.has("window") else None
        if tamanos is None and kind == "bernoulli":
            raise cfg.error("sizes", "valor requerido para oráculos exactos")
    elif len(palabras) != n:
        raise cfg.error("word", f"se esperaban {n} palabras, recibidas: {len(palabras)}")

    familia = _parse_words_early(cfg, kind, opciones, palabras) if palabras is not None else None
    oracle = build_oracle(kind, opciones, cfg.workers)
    if palabras is not None:
        if familia is None:
            familia = [_parse_word(cfg, "word", texto, oracle.k) for texto in palabras]
        reporte = witness.theorem21_statistic(Theorem21Instance.from_words(familia, eps, delta), oracle,
                                              confidence, cfg.workers)
        payload = {"report": reporte.to_dict()}
    else:
        if tamanos is None:
            tamanos = [oracle.window_length] * n
        evidencia = witness.non_atn_evidence(oracle, n, eps, delta, tamanos, budget, cfg.seed, window,
                                             confidence, cfg.workers)
        reporte = evidencia.best
        payload = {"evidence": evidencia.to_dict()}
    check = {"name": "necessary_condition", "statistic": reporte.optimistic, "bound": reporte.threshold,
             "sigma": reporte.margin, "pass": reporte.condition_met, "details": {"verdict": reporte.verdict}}
    return Outcome(payload, [check])


def _sample_bernoulli(oracle: measures.MeasureOracle, window: Tuple[int, int], count: int, seed: int) -> np.ndarray:
    bloques = [oracle.sample(window[0], window[1], stop - start, block_rng(seed, b))
               for b, start, stop in sample_blocks(count)]
    return np.concatenate(bloques, axis=0)


def _run_sample(cfg: ExperimentConfig) -> Outcome:
    kind, opciones = parse_oracle(cfg)
    window = parse_window(cfg, "window")
    samples = require_int(cfg, "samples", minimum=1)
    if not cfg.has("out_measure"):
        raise cfg.error("out_measure", "se requiere la ruta de salida (.txt o .npz)")
    ruta = Path(cfg.get("out_measure"))

    if kind == "furstenberg":
        em = furstenberg.sample_coded_measure(opciones["params"], window, samples, cfg.seed, opciones["sampler"],
                                              cfg.workers)
    else:
        oracle = build_oracle(kind, opciones, cfg.workers)
        if not oracle.contains_window(*window):
            raise cfg.error("window", "la ventana no cabe en la medida de origen")
        filas = _sample_bernoulli(oracle, window, samples, cfg.seed)
        em = measures.EmpiricalMeasure(window, filas, oracle.k, seed=cfg.seed, source=kind)
    save_empirical_measure(em, ruta)
    return Outcome({"measure": em.describe(), "path": str(ruta)})


HANDLERS: Dict[str, Callable[[ExperimentConfig], Outcome]] = {
    "ball": _run_ball,
    "bound": _run_bound,
    "entropy": _run_entropy,
    "atn-solve": _run_atn_solve,
    "furstenberg.orbit": _run_orbit,
    "furstenberg.code": _run_code,
    "furstenberg.pair-corr": _run_pair_corr,
    "furstenberg.charsum": _run_charsum,
    "furstenberg.markov": _run_markov,
    "furstenberg.ineq3": _run_ineq3,
    "check-thm21": _run_check_thm21,
    "sample": _run_sample,
}


def run(config: ExperimentConfig) -> ExperimentReport:
    """
    Ejecuta un experimento.

    Raises:
        ConfigError: Parámetros inválidos (antes de calcular)
        ValueError: Errores de dominio propagados por los módulos
    """
    manejador = HANDLERS.get(config.command)
    if manejador is None:
        raise ValueError(f"Subcomando desconocido: {config.command}")
    validate_output(config)
    logger.info(f"🚀 Ejecutando {config.command} (semilla={config.seed}, workers={config.workers})")
    inicio = time.perf_counter()
    resultado = manejador(config)
    transcurrido = time.perf_counter() - inicio
    reporte = ExperimentReport(config, tool_version(), resultado.payload, resultado.checks, transcurrido,
                               resultado.csv_text, resultado.trace)
    estado = "✅" if reporte.passed else "❌"
    logger.info(f"{estado} {config.command} terminado en {transcurrido:.2f} s")
    return reporte
