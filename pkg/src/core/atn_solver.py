"""
Resolvedor AT(n) a resolución finita

Busca n generadores g_m >= 0 y coeficientes α >= 0 tales que cada
objetivo f_i quede cerca, en L¹(ν), de Σ_{m,j} α_{i,j}^{(m)} g_m ∘ S^{t_j}.
Las traslaciones se proyectan de vuelta a la ventana de los objetivos
por esperanza condicional.

Convención de traslación: g ∘ S^t depende de las coordenadas de la
ventana de g desplazadas en -t, es decir [a - t, b - t].

Minimización alternada:
    (a) generadores fijos → un LP por objetivo para α
    (b) α fijos → un LP minimax para los valores de los generadores
e* no crece entre iteraciones: un paso que empeore se descarta.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..models.atn import AtnProblem, AtnWitness, SolverParams, StepFunction
from ..utils.rng import derive_seed, make_rng
from .errors import ShiftOutOfRangeError, WindowMismatchError
from .measures import MeasureOracle
from .simplex import LinearProgramError, solve_lp

logger = logging.getLogger(__name__)

# Columnas con todo |valor| por debajo de esto cuentan como cero
_ZERO_COLUMN = 1e-14


# ==================== ÁLGEBRA DE VENTANAS ====================

def _block_digits(k: int, length: int) -> np.ndarray:
    """Matriz (k^length, length) con los dígitos de cada bloque lexicográfico."""
    codigos = np.arange(k**length, dtype=np.int64)
    potencias = k ** np.arange(length - 1, -1, -1, dtype=np.int64)
    return (codigos[:, None] // potencias[None, :]) % k


def _encode(digits: np.ndarray, k: int) -> np.ndarray:
    potencias = k ** np.arange(digits.shape[1] - 1, -1, -1, dtype=np.int64)
    return digits @ potencias


def projection_matrix(source_window: Tuple[int, int], target_window: Tuple[int, int],
                      oracle: MeasureOracle) -> np.ndarray:
    """
    Operador de esperanza condicional E[· | x_{target}] para funciones de x_{source}.

    P[b, s] = ν(x_target = b, x_source = s) / ν(x_target = b); filas nulas
    donde ν(b) = 0.

    Raises:
        EnumerationBudgetError: Si la ventana unión no se puede enumerar
    """
    k = oracle.k
    inicio = min(source_window[0], target_window[0])
    fin = max(source_window[1], target_window[1])
    pesos = oracle.window_weights(inicio, fin)
    digitos = _block_digits(k, fin - inicio + 1)

    destino = _encode(digitos[:, target_window[0] - inicio: target_window[1] - inicio + 1], k)
    origen = _encode(digitos[:, source_window[0] - inicio: source_window[1] - inicio + 1], k)
    conjunta = np.zeros((k ** (target_window[1] - target_window[0] + 1),
                         k ** (source_window[1] - source_window[0] + 1)))
    np.add.at(conjunta, (destino, origen), pesos)

    marginal = conjunta.sum(axis=1)
    proyeccion = np.zeros_like(conjunta)
    positivas = marginal > 0
    proyeccion[positivas] = conjunta[positivas] / marginal[positivas, None]
    return proyeccion


def window_function(oracle: MeasureOracle, window: Tuple[int, int], values: np.ndarray) -> StepFunction:
    """StepFunction sobre window con los pesos del oráculo."""
    return StepFunction(window, oracle.k, values, oracle.window_weights(*window))


def l1_distance(f: StepFunction, g: StepFunction) -> float:
    """
    ‖f - g‖₁ = Σ_b |f(b) - g(b)|·ν(b)

    Raises:
        WindowMismatchError: Si las ventanas o los pesos no coinciden
    """
    f.check_compatible(g)
    return float(np.abs(f.values - g.values) @ f.weights)


def shift_column(g: StepFunction, t: int, target_window: Tuple[int, int], oracle: MeasureOracle,
                 strict: bool = True) -> StepFunction:
    """
    g ∘ S^t proyectada a target_window por esperanza condicional.

    Args:
        g: Generador sobre [a, b]
        t: Traslación; g ∘ S^t depende de [a - t, b - t]
        target_window: Ventana de destino
        oracle: Medida de referencia
        strict: Si True, exige que la ventana trasladada se solape con el destino

    Raises:
        ShiftOutOfRangeError: Solapamiento vacío con strict=True
    """
    a, b = g.window
    origen = (a - t, b - t)
    if strict and (origen[1] < target_window[0] or target_window[1] < origen[0]):
        raise ShiftOutOfRangeError()
    proyeccion = projection_matrix(origen, target_window, oracle)
    return window_function(oracle, target_window, proyeccion @ g.values)


# ==================== SUB-PROBLEMA DE COEFICIENTES ====================

def _fit_target(values: np.ndarray, columns: np.ndarray, weights: np.ndarray,
                mass: Optional[float], backend: str) -> Tuple[np.ndarray, float]:
    """
    min_α Σ_b w_b |f(b) - Σ_c α_c col_c(b)| con α >= 0.

    Variables: [α (C), u (B), v (B)]; f - Col·α = u - v.
    """
    n_cols = columns.shape[1]
    if n_cols == 0 or np.abs(columns).max() < _ZERO_COLUMN:
        return np.zeros(n_cols), float(values @ weights)

    activos = weights > 0
    col = columns[activos]
    f = values[activos]
    w = weights[activos]
    bloques = f.shape[0]

    c = np.concatenate([np.zeros(n_cols), w, w])
    a_eq = np.hstack([col, np.eye(bloques), -np.eye(bloques)])
    b_eq = f
    if mass is not None:
        fila = np.concatenate([np.ones(n_cols), np.zeros(2 * bloques)])
        a_eq = np.vstack([a_eq, fila])
        b_eq = np.concatenate([b_eq, [mass]])

    resultado = solve_lp(c, A_eq=a_eq, b_eq=b_eq, backend=backend)
    alpha = resultado.x[:n_cols]
    error = float(np.abs(values - columns @ alpha) @ weights)
    return alpha, error


def solve_coefficients(targets: Sequence[StepFunction], columns: Sequence[StepFunction],
                       mass_normalized: bool = False, backend: str = "simplex") -> Tuple[np.ndarray, np.ndarray]:
    """
    Resuelve, objetivo por objetivo, min ‖f_i - Σ_c α_{i,c} column_c‖₁ con α >= 0.

    Returns:
        (alpha, errors): alpha de forma (K, C), errors de forma (K,)

    Raises:
        WindowMismatchError: Si alguna columna no vive en la ventana de los objetivos
    """
    if not targets:
        raise ValueError("Se necesita al menos un objetivo")
    referencia = targets[0]
    for funcion in list(targets[1:]) + list(columns):
        referencia.check_compatible(funcion)
    matriz = (np.column_stack([col.values for col in columns]) if columns
              else np.zeros((len(referencia.values), 0)))

    alphas = np.zeros((len(targets), matriz.shape[1]))
    errores = np.zeros(len(targets))
    for i, f in enumerate(targets):
        masa = f.norm if mass_normalized else None
        alphas[i], errores[i] = _fit_target(f.values, matriz, referencia.weights, masa, backend)
    return alphas, errores


# ==================== ESTADO DE LA MINIMIZACIÓN ====================

class _Instance:
    """Datos precomputados de un AtnProblem: matrices de proyección y pesos."""

    def __init__(self, problem: AtnProblem):
        self.problem = problem
        self.targets = np.vstack([f.values for f in problem.targets])
        self.weights = problem.targets[0].weights
        self.generator_window = problem.generator_window
        self.generator_weights = problem.oracle.window_weights(*self.generator_window)
        a, b = self.generator_window
        self.projections = [projection_matrix((a - t, b - t), problem.window, problem.oracle)
                            for t in problem.shifts]

    @property
    def generator_blocks(self) -> int:
        return self.generator_weights.shape[0]

    def columns(self, generators: np.ndarray) -> np.ndarray:
        """Columnas (B, n·|𝒯|) en orden (m, j)."""
        return np.column_stack([p @ g for g in generators for p in self.projections])

    def errors(self, generators: np.ndarray, alpha: np.ndarray) -> np.ndarray:
        aprox = alpha.reshape(alpha.shape[0], -1) @ self.columns(generators).T
        return np.abs(self.targets - aprox) @ self.weights


def _step_coefficients(inst: _Instance, generators: np.ndarray) -> np.ndarray:
    """Paso (a): α óptimo para generadores fijos."""
    params = inst.problem.params
    columnas = inst.columns(generators)
    n, shifts = generators.shape[0], len(inst.problem.shifts)
    alpha = np.zeros((inst.targets.shape[0], n, shifts))
    for i, f in enumerate(inst.targets):
        masa = float(f @ inst.weights) if params.mass_normalized else None
        coeficientes, _ = _fit_target(f, columnas, inst.weights, masa, params.lp_backend)
        alpha[i] = coeficientes.reshape(n, shifts)
    return alpha


def _step_generators(inst: _Instance, alpha: np.ndarray) -> np.ndarray:
    """
    Paso (b): con α fijos, min z tal que Σ_b w_b |f_i(b) - (A_i g)(b)| <= z para todo i.

    Variables: [g (n·G), u (K·B'), v (K·B'), z], B' = bloques con peso positivo.
    """
    params = inst.problem.params
    K, n, _ = alpha.shape
    G = inst.generator_blocks
    activos = inst.weights > 0
    w = inst.weights[activos]
    B = int(activos.sum())
    proyecciones = [p[activos] for p in inst.projections]

    n_g = n * G
    n_vars = n_g + 2 * K * B + 1
    a_eq = np.zeros((K * B, n_vars))
    b_eq = np.zeros(K * B)
    a_ub = np.zeros((K, n_vars))
    for i in range(K):
        filas = slice(i * B, (i + 1) * B)
        for m in range(n):
            operador = sum(alpha[i, m, j] * p for j, p in enumerate(proyecciones))
            a_eq[filas, m * G:(m + 1) * G] = operador
        a_eq[filas, n_g + i * B: n_g + (i + 1) * B] = np.eye(B)
        a_eq[filas, n_g + K * B + i * B: n_g + K * B + (i + 1) * B] = -np.eye(B)
        b_eq[filas] = inst.targets[i, activos]
        a_ub[i, n_g + i * B: n_g + (i + 1) * B] = w
        a_ub[i, n_g + K * B + i * B: n_g + K * B + (i + 1) * B] = w
        a_ub[i, -1] = -1.0

    if params.mass_normalized:
        normas = np.zeros((n, n_vars))
        for m in range(n):
            normas[m, m * G:(m + 1) * G] = inst.generator_weights
        a_eq = np.vstack([a_eq, normas])
        b_eq = np.concatenate([b_eq, np.ones(n)])

    c = np.zeros(n_vars)
    c[-1] = 1.0
    resultado = solve_lp(c, A_ub=a_ub, b_ub=np.zeros(K), A_eq=a_eq, b_eq=b_eq, backend=params.lp_backend)
    return resultado.x[:n_g].reshape(n, G)


def _renormalize(inst: _Instance, generators: np.ndarray, alpha: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """‖g_m‖₁ = 1 reescalando α; un g_m nulo pasa a constante 1 con α = 0."""
    generators = generators.copy()
    alpha = alpha.copy()
    for m in range(generators.shape[0]):
        norma = float(generators[m] @ inst.generator_weights)
        if norma <= _ZERO_COLUMN:
            generators[m] = 1.0
            alpha[:, m, :] = 0.0
        else:
            generators[m] /= norma
            alpha[:, m, :] *= norma
    return generators, alpha


def _optimize_from(inst: _Instance, generators: np.ndarray, alpha: Optional[np.ndarray], start: str) -> AtnWitness:
    """Minimización alternada desde un estado inicial."""
    params = inst.problem.params
    if alpha is None:
        try:
            alpha = _step_coefficients(inst, generators)
        except RuntimeError as e:
            logger.error(f"❌ Paso inicial de coeficientes fallido (siembra {start}): {e}")
            raise
    errores = inst.errors(generators, alpha)
    traza = [float(errores.max())]
    iteraciones = 0

    while iteraciones < params.max_iterations and traza[-1] > params.tolerance:
        try:
            nuevos_g = _step_generators(inst, alpha)
            nuevos_g, nuevo_alpha = _renormalize(inst, nuevos_g, alpha)
            nuevo_alpha = _step_coefficients(inst, nuevos_g)
        except RuntimeError as e:
            logger.warning(f"⚠️ Iteración {iteraciones + 1} descartada: {e}")
            break
        nuevos_errores = inst.errors(nuevos_g, nuevo_alpha)
        nuevo = float(nuevos_errores.max())
        iteraciones += 1
        if nuevo > traza[-1]:
            logger.debug(f"Iteración {iteraciones}: {nuevo:.3e} > {traza[-1]:.3e}, se conserva el estado")
            break
        mejora = traza[-1] - nuevo
        generators, alpha, errores = nuevos_g, nuevo_alpha, nuevos_errores
        traza.append(nuevo)
        logger.debug(f"Iteración {iteraciones}: e* = {nuevo:.6e}")
        if mejora < params.tolerance:
            break

    funciones = [StepFunction(inst.generator_window, inst.problem.k, g, inst.generator_weights) for g in generators]
    return AtnWitness(funciones, alpha, errores, inst.problem.shifts, traza, iteraciones, start)


# ==================== SIEMBRAS ====================

def _random_generators(inst: _Instance, count: int, rng: np.random.Generator) -> np.ndarray:
    generadores = rng.random((count, inst.generator_blocks)) + 1e-3
    return generadores / (generadores @ inst.generator_weights)[:, None]


def _normalized_rows(rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    normas = rows @ weights
    return rows / np.where(normas > 0, normas, 1.0)[:, None]


def _initial_generators(inst: _Instance, seed: int) -> List[Tuple[str, np.ndarray]]:
    """
    Estados iniciales: los primeros n objetivos, siembra por punto más
    lejano (si la ventana de generadores es la de los objetivos) y
    reinicios aleatorios.
    """
    problem = inst.problem
    n = problem.n
    semillas: List[Tuple[str, np.ndarray]] = []
    misma_ventana = problem.generator_window == problem.window
    relleno = make_rng(derive_seed(seed, "fill"))

    if misma_ventana:
        utiles = [f for f in inst.targets if f @ inst.weights > 0]
        if utiles:
            normalizados = _normalized_rows(np.vstack(utiles), inst.weights)
            primeros = normalizados[:n]
            if primeros.shape[0] < n:
                primeros = np.vstack([primeros, _random_generators(inst, n - primeros.shape[0], relleno)])
            semillas.append(("targets", primeros))

            elegidos = [0]
            while len(elegidos) < min(n, normalizados.shape[0]):
                distancias = np.array([
                    min(np.abs(fila - normalizados[j]) @ inst.weights for j in elegidos)
                    for fila in normalizados
                ])
                distancias[elegidos] = -1.0
                elegidos.append(int(np.argmax(distancias)))
            lejanos = normalizados[elegidos]
            if lejanos.shape[0] < n:
                lejanos = np.vstack([lejanos, _random_generators(inst, n - lejanos.shape[0], relleno)])
            semillas.append(("farthest", lejanos))

    for r in range(problem.params.restarts):
        rng = make_rng(derive_seed(seed, f"restart-{r}"))
        semillas.append((f"random-{r}", _random_generators(inst, n, rng)))
    if not semillas:
        semillas.append(("random-0", _random_generators(inst, n, relleno)))
    return semillas


def _best(witnesses: Sequence[AtnWitness]) -> AtnWitness:
    """Mínimo e*; en empate gana la primera siembra."""
    return min(enumerate(witnesses), key=lambda par: (par[1].max_error, par[0]))[1]


# ==================== API ====================

def alternate_optimize(problem: AtnProblem, seed: int = 0) -> AtnWitness:
    """
    Minimización alternada con varias siembras; devuelve la mejor.

    Con max_iterations = 0 devuelve el testigo inicial (paso (a) sobre la
    mejor siembra).
    """
    inst = _Instance(problem)
    semillas = _initial_generators(inst, seed)
    logger.info(f"🔄 AT({problem.n}): {problem.target_count} objetivos, |𝒯|={len(problem.shifts)}, "
                f"{len(semillas)} siembras")

    def resolver(par: Tuple[str, np.ndarray]) -> Optional[AtnWitness]:
        nombre, generadores = par
        try:
            return _optimize_from(inst, generadores, None, nombre)
        except RuntimeError:
            return None

    workers = problem.params.workers
    if workers > 1 and len(semillas) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            testigos = list(pool.map(resolver, semillas))
    else:
        testigos = [resolver(par) for par in semillas]

    validos = [t for t in testigos if t is not None]
    if not validos:
        raise LinearProgramError(f"Ninguna de las {len(semillas)} siembras pudo resolver el paso inicial")
    mejor = _best(validos)
    logger.info(f"✅ AT({problem.n}): e* = {mejor.max_error:.6e} (siembra {mejor.start})")
    return mejor


def warm_start(problem: AtnProblem, previous: AtnWitness, seed: int = 0) -> AtnWitness:
    """
    Continúa desde los generadores de un testigo con n-1 generadores más
    uno nuevo (con α = 0), así que e* nunca supera al de previous.
    """
    inst = _Instance(problem)
    extra = problem.n - previous.n
    if extra < 0:
        raise ValueError("El problema tiene menos generadores que el testigo previo")
    if previous.generators and previous.generators[0].window != problem.generator_window:
        raise WindowMismatchError("El testigo previo usa otra ventana de generadores")
    rng = make_rng(derive_seed(seed, f"warm-{problem.n}"))
    generadores = np.vstack([g.values for g in previous.generators] + [_random_generators(inst, extra, rng)])
    alpha = np.concatenate(
        [previous.coefficients, np.zeros((problem.target_count, extra, len(problem.shifts)))], axis=1
    )
    return _optimize_from(inst, generadores, alpha, "warm")


def defect_profile(oracle: MeasureOracle, targets: Sequence[StepFunction], n_max: int,
                   params: SolverParams, seed: int = 0) -> List[AtnWitness]:
    """
    Perfil e*(n), n = 1..n_max, con anidamiento: para cada n se comparan
    las siembras normales con el arranque en caliente desde n-1, así que
    e*(n) <= e*(n-1).
    """
    if n_max < 1:
        raise ValueError(f"n_max debe ser >= 1, recibido: {n_max}")
    perfil: List[AtnWitness] = []
    for n in range(1, n_max + 1):
        problem = AtnProblem(oracle, list(targets), n, params)
        candidatos = [alternate_optimize(problem, seed)]
        if perfil:
            candidatos.append(warm_start(problem, perfil[-1], seed))
        perfil.append(_best(candidatos))
        logger.info(f"📊 e*({n}) = {perfil[-1].max_error:.6e}")
    return perfil


# ==================== INSTANCIAS ====================

def cylinder_indicator_targets(oracle: MeasureOracle, length: int, count: int, start: int = 0) -> List[StepFunction]:
    """
    Indicadores normalizados 𝟙_C/ν(C) de los primeros count cilindros
    distintos de longitud length (orden lexicográfico, solo ν(C) > 0).

    Raises:
        EnumerationBudgetError: Si k^length excede el presupuesto
        ValueError: Si no hay suficientes cilindros con medida positiva
    """
    if length < 1 or count < 1:
        raise ValueError("length y count deben ser >= 1")
    window = (start, start + length - 1)
    pesos = oracle.window_weights(*window)
    positivos = np.flatnonzero(pesos > 0)
    if positivos.size < count:
        raise ValueError(f"Solo hay {positivos.size} cilindros de medida positiva; se pidieron {count}")
    objetivos = []
    for bloque in positivos[:count]:
        valores = np.zeros(pesos.shape[0])
        valores[bloque] = 1.0 / pesos[bloque]
        objetivos.append(StepFunction(window, oracle.k, valores, pesos))
    return objetivos


def planted_instance(oracle: MeasureOracle, window: Tuple[int, int], n: int, target_count: int,
                     shifts: Sequence[int], seed: int = 0) -> Tuple[List[StepFunction], List[StepFunction]]:
    """
    Instancia sintética de rango n: n generadores aleatorios normalizados y
    objetivos que son combinaciones no negativas de sus trasladados.

    Los primeros n objetivos son los propios generadores.

    Returns:
        (targets, generators)
    """
    if target_count < n:
        raise ValueError(f"Se necesitan al menos n={n} objetivos, recibido: {target_count}")
    if 0 not in shifts:
        raise ValueError("𝒯 debe contener 0 para plantar los generadores")
    rng = make_rng(derive_seed(seed, "planted"))
    pesos = oracle.window_weights(*window)
    generadores = []
    for _ in range(n):
        valores = rng.random(pesos.shape[0]) + 0.05
        generadores.append(StepFunction(window, oracle.k, valores / (valores @ pesos), pesos))

    columnas = [shift_column(g, t, window, oracle, strict=False) for g in generadores for t in shifts]
    objetivos = list(generadores)
    for _ in range(target_count - n):
        alpha = rng.random(len(columnas)) * (rng.random(len(columnas)) < 0.6)
        if not alpha.any():
            alpha[0] = 1.0
        objetivos.append(StepFunction(window, oracle.k, sum(a * c.values for a, c in zip(alpha, columnas)), pesos))
    return objetivos, generadores


def profile_summary(profile: Sequence[AtnWitness]) -> Dict[str, List[float]]:
    return {
        "n": [w.n for w in profile],
        "max_error": [w.max_error for w in profile],
        "mean_error": [w.mean_error for w in profile],
    }
