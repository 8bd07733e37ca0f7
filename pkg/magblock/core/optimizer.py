# magblock/core/optimizer.py
# Sweeps of g2 over detuning, squeezing or dephasing, dip finding, and the
# (Delta, lambda) search for the deepest blockade dip.

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from magblock.core.amplitudes import g2_analytic, g2_analytic_grid, interference_condition
from magblock.core.curves import CorrelationCurve
from magblock.core.errors import ComputationError, NoInteriorMinimumError, ParameterError
from magblock.core.lindblad import g2_numeric
from magblock.core.model import DEFAULT_DIM, SystemParams
from magblock.core.operators import Mode
from magblock.core.parallel import ordered_map

logger = logging.getLogger(__name__)

SWEEP_VARIABLES = ("delta", "lambda", "gamma_p")
ENGINES = ("analytic", "numeric")

DEFAULT_DELTA_BOUNDS = (-2.0, 12.0)
DEFAULT_LAMBDA_BOUNDS = (0.0, 1e-3)
LOG_FLOOR = 1e-300

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


@dataclass(frozen=True)
class Optimum:
    """Deepest g2 dip found in the (Delta, lambda) box; Delta and lambda in units of omega_b."""
    delta_opt: float
    lambda_opt: float
    g2_min: float
    mode: Mode
    delta_bounds: Tuple[float, float]
    lambda_bounds: Tuple[float, float]
    grid_shape: Tuple[int, int]
    iterations: int
    delta_bracket: float
    lambda_bracket: float
    kerr_strength: float
    predicted: Optional[Tuple[float, float]] = None
    trace: Tuple[Tuple[int, float, float, float], ...] = field(default=(), repr=False)


@dataclass(frozen=True)
class Dip:
    x: float
    g2: float
    kind: str


def params_at(params: SystemParams, variable: str, value: float) -> SystemParams:
    """Parameters with one sweep variable set; delta and lambda are in units of omega_b, gamma_p in kappa."""
    if variable == "delta":
        return params.with_detuning(value * params.omega_b)
    if variable == "lambda":
        return params.replace(lam=value * params.omega_b)
    if variable == "gamma_p":
        return params.replace(gamma_p=value)
    raise ParameterError(f"Unknown sweep variable '{variable}', expected one of {SWEEP_VARIABLES}.")


def sweep_grid(value_range: Tuple[float, float], n_points: int) -> np.ndarray:
    lo, hi = value_range
    if n_points < 2:
        raise ParameterError(f"A sweep needs at least 2 points, got {n_points}.")
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ParameterError(f"Sweep range [{lo}, {hi}] is empty or not finite.")
    return np.linspace(lo, hi, n_points)


def scan(params: SystemParams, variable: str, value_range: Tuple[float, float], n_points: int, mode: Mode,
         engine: str = "analytic", dim_m: int = DEFAULT_DIM, dim_c: int = DEFAULT_DIM,
         include_dephasing: bool = False, dephasing_target: str = "cavity", workers: int = 1) -> CorrelationCurve:
    """
    g2(0) of `mode` along one variable. Points where the engine fails
    (degenerate denominators, singular solves) are NaN gaps.
    """
    mode = Mode(mode)
    if engine not in ENGINES:
        raise ParameterError(f"Unknown engine '{engine}', expected one of {ENGINES}.")
    if variable not in SWEEP_VARIABLES:
        raise ParameterError(f"Unknown sweep variable '{variable}', expected one of {SWEEP_VARIABLES}.")
    xs = sweep_grid(value_range, n_points)
    dephasing = include_dephasing or variable == "gamma_p"

    def evaluate(x: float) -> float:
        point = params_at(params, variable, float(x))
        try:
            if engine == "analytic":
                return g2_analytic(point, mode)
            return g2_numeric(point, mode, dim_m, dim_c, dephasing, dephasing_target)
        except ComputationError as e:
            logger.info("Gap at %s = %.6g: %s", variable, x, e)
            return float("nan")

    values = ordered_map(evaluate, xs, workers)
    if all(math.isnan(v) for v in values):
        raise ComputationError(f"The {engine} engine failed at every point of the {variable} sweep.")
    metadata = {"variable": variable, "engine": engine, "mode": mode.value}
    if engine == "numeric":
        metadata.update(dims=f"{dim_m}x{dim_c}", dephasing=f"{dephasing}/{dephasing_target}")
    return CorrelationCurve.from_values(f"{variable}_{mode.value}_{engine}", xs, values,
                                        params=params.as_dict(), metadata=metadata)


def find_dips(curve: CorrelationCurve, kind: Optional[str] = None) -> List[Dip]:
    """Interior local minima of a curve, labelled antibunching (g2 < 1) or bunching."""
    pts = curve.points
    dips = []
    for k in range(1, len(pts) - 1):
        left, here, right = pts[k - 1], pts[k], pts[k + 1]
        if left.is_gap or here.is_gap or right.is_gap:
            continue
        if here.g2 < left.g2 and here.g2 <= right.g2:
            label = "antibunching" if here.g2 < 1.0 else "bunching"
            if kind is None or kind == label:
                dips.append(Dip(here.x, here.g2, label))
    return dips


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float) -> Tuple[float, float]:
    """
    Golden-section search.

    Given a function f with a single local minimum in
    the interval [a,b], returns a subset interval
    [c,d] that contains the minimum with d-c <= tol.
    """
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        return a, b

    # Required steps to achieve tolerance
    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return a, d
    return c, b


def _log_g2(params: SystemParams, mode: Mode, delta: float, lam: float) -> float:
    try:
        value = g2_analytic(params.with_detuning(delta * params.omega_b).replace(lam=lam * params.omega_b), mode)
    except ComputationError:
        return math.inf
    return math.log10(max(value, LOG_FLOOR))


def _coarse_minimum(log_grid: np.ndarray, deltas: np.ndarray) -> Tuple[int, int]:
    finite = np.where(np.isfinite(log_grid), log_grid, np.inf)
    best = finite.min()
    if not np.isfinite(best):
        raise NoInteriorMinimumError("g2 is undefined everywhere on the search grid.")
    rows, cols = np.nonzero(finite == best)
    # equal-depth dips: smallest |Delta| wins
    k = min(range(len(rows)), key=lambda j: (abs(deltas[rows[j]]), rows[j], cols[j]))
    return int(rows[k]), int(cols[k])


def find_optimum(params: SystemParams, mode: Mode, delta_bounds: Tuple[float, float] = DEFAULT_DELTA_BOUNDS,
                 lambda_bounds: Tuple[float, float] = DEFAULT_LAMBDA_BOUNDS, n_delta: int = 200,
                 n_lambda: int = 50, delta_tol: float = 1e-4, lambda_tol: float = 1e-6,
                 max_rounds: int = 200) -> Optimum:
    """
    Minimises log10 g2_analytic over the (Delta, lambda) box: a coarse grid,
    then alternating golden-section refinements in Delta and lambda until
    both brackets are within tolerance and the point stops moving.
    """
    mode = Mode(mode)
    d_lo, d_hi = delta_bounds
    l_lo, l_hi = lambda_bounds
    if not (d_hi > d_lo and l_hi >= l_lo >= 0):
        raise ParameterError(f"Invalid search bounds: delta {delta_bounds}, lambda {lambda_bounds}.")
    deltas = np.linspace(d_lo, d_hi, n_delta)
    lambda_pinned = l_hi == l_lo
    lambdas = np.array([l_lo]) if lambda_pinned else np.linspace(l_lo, l_hi, n_lambda)

    g2_grid = g2_analytic_grid(params, deltas * params.omega_b, lambdas * params.omega_b, mode)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_grid = np.log10(np.maximum(g2_grid, LOG_FLOOR))
    i, j = _coarse_minimum(log_grid, deltas)
    if i in (0, n_delta - 1):
        raise NoInteriorMinimumError(
            f"No interior minimum: the lowest g2 on the grid sits on the Delta boundary {deltas[i]:.6g}."
        )
    delta, lam = float(deltas[i]), float(lambdas[j])
    d_step = deltas[1] - deltas[0]
    l_step = 0.0 if lambda_pinned else lambdas[1] - lambdas[0]
    logger.debug("Coarse minimum at Delta=%.6g, lambda=%.6g (log10 g2 = %.4g)", delta, lam, log_grid[i, j])

    trace = [(0, delta, lam, float(log_grid[i, j]))]
    d_bracket = l_bracket = 0.0
    rounds = 0
    for rounds in range(1, max_rounds + 1):
        a, b = golden_section(lambda x: _log_g2(params, mode, x, lam),
                              max(d_lo, delta - 2 * d_step), min(d_hi, delta + 2 * d_step), delta_tol)
        new_delta, d_bracket = 0.5 * (a + b), b - a
        new_lam = lam
        if not lambda_pinned:
            a, b = golden_section(lambda y: _log_g2(params, mode, new_delta, y),
                                  max(l_lo, lam - 2 * l_step), min(l_hi, lam + 2 * l_step), lambda_tol)
            new_lam, l_bracket = 0.5 * (a + b), b - a
        moved_delta, moved_lam = abs(new_delta - delta), abs(new_lam - lam)
        delta, lam = new_delta, new_lam
        trace.append((rounds, delta, lam, _log_g2(params, mode, delta, lam)))
        if moved_delta <= delta_tol and moved_lam <= lambda_tol:
            break
    else:
        logger.warning("Refinement stopped after %d rounds without settling", max_rounds)

    if delta - d_lo <= delta_tol or d_hi - delta <= delta_tol:
        raise NoInteriorMinimumError(f"No interior minimum: refinement ran into the Delta boundary at {delta:.6g}.")

    point = params.with_detuning(delta * params.omega_b).replace(lam=lam * params.omega_b)
    g2_min = g2_analytic(point, mode)

    predicted = None
    try:
        roots = interference_condition(params, mode, delta_bounds)
    except ComputationError:
        roots = []
    in_box = [r for r in roots if l_lo <= r[1] / params.omega_b <= l_hi]
    if in_box:
        best = min(in_box, key=lambda r: abs(r[0] - delta))
        predicted = (best[0], best[1] / params.omega_b)

    logger.info("Optimum for %s: Delta=%.6g, lambda=%.6g, g2=%.3e after %d rounds",
                mode.value, delta, lam, g2_min, rounds)
    return Optimum(
        delta_opt=delta,
        lambda_opt=lam,
        g2_min=g2_min,
        mode=mode,
        delta_bounds=(float(d_lo), float(d_hi)),
        lambda_bounds=(float(l_lo), float(l_hi)),
        grid_shape=(n_delta, len(lambdas)),
        iterations=rounds,
        delta_bracket=d_bracket,
        lambda_bracket=l_bracket,
        kerr_strength=params.mu,
        predicted=predicted,
        trace=tuple(trace),
    )

