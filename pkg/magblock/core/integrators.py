# magblock/core/integrators.py
# Time stepping for constant linear systems dy/dt = A y.
#
# Both the amplitude equations and the vectorised master equation are linear
# with a time-independent generator, so one RK4 step is a fixed matrix
# R(h) = rk4_step(I, A, h). Propagators are built once per distinct output
# interval and reused along the grid.

from __future__ import annotations

import logging
import math
from typing import Callable, Dict, Tuple

import numpy as np
from scipy.linalg import expm

from magblock.core.errors import IntegrationError

logger = logging.getLogger(__name__)

METHODS = ("rk4", "expm")


def rk4_step(y: np.ndarray, fun: Callable[[np.ndarray], np.ndarray], dt: float) -> np.ndarray:
    """
    Runge-Kutta 4 integrator to propagate for a single time step
    """
    dt2 = dt / 2.0

    k1 = fun(y)
    k2 = fun(y + k1 * dt2)
    k3 = fun(y + k2 * dt2)
    k4 = fun(y + k3 * dt)

    return y + (k1 + 2 * k2 + 2 * k3 + k4) / 6.0 * dt


def rk4_propagator(generator: np.ndarray, dt: float) -> np.ndarray:
    """The one-step RK4 map of dy/dt = generator @ y as a matrix."""
    eye = np.eye(generator.shape[0], dtype=complex)
    return rk4_step(eye, lambda y: generator @ y, dt)


def check_time_grid(t_grid, require_zero_start: bool = False) -> np.ndarray:
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise ValueError("Time grid must be a non-empty 1-D sequence.")
    if not np.all(np.isfinite(t_grid)):
        raise ValueError("Time grid must be finite.")
    if np.any(np.diff(t_grid) <= 0):
        raise ValueError("Time grid must be strictly increasing.")
    if require_zero_start and t_grid[0] != 0.0:
        raise ValueError(f"Time grid must start at 0, got {t_grid[0]}.")
    return t_grid


class LinearPropagator:
    """
    Propagates y(t) under dy/dt = generator @ y along an output grid.

    method="rk4" uses fixed steps no longer than `max_step`; when
    `richardson_tol` is set, every interval is also integrated at half the
    step and the two results must agree to that tolerance.
    method="expm" uses the exact exponential of the generator per interval.
    """

    def __init__(self, generator: np.ndarray, method: str = "rk4", max_step: float | None = None,
                 richardson_tol: float | None = None):
        if method not in METHODS:
            raise ValueError(f"Unknown propagation method '{method}', expected one of {METHODS}.")
        if method == "rk4" and (max_step is None or max_step <= 0):
            raise ValueError("rk4 propagation needs a positive max_step.")
        self.generator = np.asarray(generator, dtype=complex)
        self.method = method
        self.max_step = max_step
        self.richardson_tol = richardson_tol
        self._cache: Dict[Tuple[float, int], np.ndarray] = {}

    def _rk4_interval(self, interval: float, n_steps: int) -> np.ndarray:
        key = (round(interval, 14), n_steps)
        if key not in self._cache:
            step = rk4_propagator(self.generator, interval / n_steps)
            self._cache[key] = np.linalg.matrix_power(step, n_steps)
        return self._cache[key]

    def _expm_interval(self, interval: float) -> np.ndarray:
        key = (round(interval, 14), 0)
        if key not in self._cache:
            self._cache[key] = expm(self.generator * interval)
        return self._cache[key]

    def run(self, y0: np.ndarray, t_grid) -> np.ndarray:
        """Returns an array of shape (len(t_grid), len(y0)); row 0 is y0 at t_grid[0]."""
        t_grid = check_time_grid(t_grid)
        y = np.asarray(y0, dtype=complex).copy()
        out = np.empty((t_grid.size, y.size), dtype=complex)
        out[0] = y
        for k in range(1, t_grid.size):
            interval = t_grid[k] - t_grid[k - 1]
            if self.method == "expm":
                y_next = self._expm_interval(interval) @ y
            else:
                n_steps = max(1, math.ceil(interval / self.max_step - 1e-12))
                y_next = self._rk4_interval(interval, n_steps) @ y
                if self.richardson_tol is not None:
                    y_fine = self._rk4_interval(interval, 2 * n_steps) @ y
                    scale = max(1.0, float(np.max(np.abs(y_fine))))
                    error = float(np.max(np.abs(y_fine - y_next)))
                    if error > self.richardson_tol * scale:
                        raise IntegrationError(
                            f"Step-halving check failed: difference {error:.3e} exceeds tolerance", t_grid[k]
                        )
                    y_next = y_fine
            if not np.all(np.isfinite(y_next)):
                raise IntegrationError("Integration produced non-finite values", t_grid[k])
            y = y_next
            out[k] = y
        logger.debug("Propagated %d output points with %s (%d cached propagators)",
                     t_grid.size, self.method, len(self._cache))
        return out
