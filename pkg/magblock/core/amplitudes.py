# magblock/core/amplitudes.py
# Two-excitation amplitude picture: the linear equations for P_qr (q + r <= 2),
# their steady states (numerical and closed form) and the analytic g2(0).

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from magblock.core.errors import (
    DegenerateDenominatorError,
    ParameterError,
    SingularSystemError,
    UnpopulatedModeError,
)
from magblock.core.integrators import LinearPropagator, check_time_grid
from magblock.core.model import SystemParams
from magblock.core.operators import Mode

logger = logging.getLogger(__name__)

DEGENERACY_FLOOR = 1e-30
RICHARDSON_TOL = 1e-8
SQRT2 = math.sqrt(2.0)

AMPLITUDE_LABELS = ("p00", "p10", "p01", "p11", "p20", "p02")


@dataclass(frozen=True)
class AmplitudeState:
    """Amplitudes of |q, r> (q magnons, r photons) with q + r <= 2."""
    p00: complex = 1.0
    p10: complex = 0.0
    p01: complex = 0.0
    p11: complex = 0.0
    p20: complex = 0.0
    p02: complex = 0.0

    def as_vector(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in AMPLITUDE_LABELS], dtype=complex)

    @classmethod
    def from_vector(cls, vector: Sequence[complex]) -> "AmplitudeState":
        if len(vector) != len(AMPLITUDE_LABELS):
            raise ValueError(f"Expected {len(AMPLITUDE_LABELS)} amplitudes, got {len(vector)}.")
        return cls(*(complex(v) for v in vector))

    @classmethod
    def vacuum(cls) -> "AmplitudeState":
        return cls()

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.as_vector()) ** 2))

    def relative_to_vacuum(self) -> "AmplitudeState":
        """Rescale so that p00 = 1, the convention of the closed forms."""
        if abs(self.p00) < DEGENERACY_FLOOR:
            raise DegenerateDenominatorError("Vacuum amplitude vanished, cannot rescale.")
        return AmplitudeState.from_vector(self.as_vector() / self.p00)

    def __add__(self, other: "AmplitudeState") -> "AmplitudeState":
        return AmplitudeState.from_vector(self.as_vector() + other.as_vector())

    def __mul__(self, factor: complex) -> "AmplitudeState":
        return AmplitudeState.from_vector(complex(factor) * self.as_vector())

    __rmul__ = __mul__


@dataclass(frozen=True)
class AnalyticIngredients:
    """Delta' = Delta - i kappa/2, chi and the numerators/denominator A, B, C of the closed forms."""
    delta_prime: complex
    chi: complex
    a_num: complex
    b_den: complex
    c_num: complex
    mu: float
    g_mc: float

    def chi_residual(self) -> float:
        d = self.delta_prime
        return abs(self.chi - (self.g_mc ** 2 + self.mu * d - d ** 2))


def amplitude_matrix(params: SystemParams, back_action: bool = True, pin_vacuum: bool = False) -> np.ndarray:
    """
    Matrix M of i dP/dt = M P in the order (p00, p10, p01, p11, p20, p02).

    back_action=False drops the feedback of second-order amplitudes onto the
    first-order lines (the sqrt(2) E P20 and E P11 terms), which is the weak-drive
    ordering the closed forms rely on. pin_vacuum=True zeroes the P00 line.
    """
    mu = params.mu
    e, g, lam = params.drive, params.g_mc, params.lam
    dm = params.delta_m - 0.5j * params.kappa_m
    dc = params.delta_c - 0.5j * params.kappa_c
    phase = cmath.exp(1j * params.theta)
    fb = 1.0 if back_action else 0.0

    m = np.zeros((6, 6), dtype=complex)
    if not pin_vacuum:
        m[0, 1] = e
        m[0, 4] = -1j * SQRT2 * lam * phase.conjugate()
    m[1, 0] = e
    m[1, 1] = dm - mu
    m[1, 2] = g
    m[1, 4] = fb * SQRT2 * e
    m[2, 1] = g
    m[2, 2] = dc
    m[2, 3] = fb * e
    m[3, 2] = e
    m[3, 3] = dc + dm - mu
    m[3, 4] = SQRT2 * g
    m[3, 5] = SQRT2 * g
    m[4, 0] = 1j * lam * SQRT2 * phase
    m[4, 1] = SQRT2 * e
    m[4, 3] = SQRT2 * g
    m[4, 4] = 2.0 * (dm - 2.0 * mu)
    m[5, 3] = SQRT2 * g
    m[5, 5] = 2.0 * dc
    return m


def amplitude_rhs(state: AmplitudeState, params: SystemParams) -> AmplitudeState:
    """Time derivative dP/dt = -i M P of all six amplitudes."""
    return AmplitudeState.from_vector(-1j * (amplitude_matrix(params) @ state.as_vector()))


def _default_step(matrix: np.ndarray) -> float:
    scale = max(float(np.max(np.sum(np.abs(matrix), axis=1))), 1.0)
    return 0.01 / scale


def evolve_amplitudes(params: SystemParams, initial: AmplitudeState, t_grid,
                      pin_vacuum: bool = False, back_action: bool = True) -> List[AmplitudeState]:
    """
    Integrates the amplitude equations from `initial` at t_grid[0] = 0 with
    fixed-step RK4 and a step-halving check at every output point.
    """
    t_grid = check_time_grid(t_grid, require_zero_start=True)
    matrix = amplitude_matrix(params, back_action=back_action, pin_vacuum=pin_vacuum)
    propagator = LinearPropagator(-1j * matrix, method="rk4", max_step=_default_step(matrix),
                                  richardson_tol=RICHARDSON_TOL)
    trajectory = propagator.run(initial.as_vector(), t_grid)
    return [AmplitudeState.from_vector(row) for row in trajectory]


def steady_amplitudes_linear(params: SystemParams, back_action: bool = False) -> AmplitudeState:
    """
    Stationary amplitudes with P00 pinned to 1, from the remaining five lines.

    Works for any theta and asymmetric rates/detunings. With back_action=False
    (default) it solves the weak-drive ordering and is the oracle for
    `steady_amplitudes_closed`; back_action=True keeps every term.
    """
    m = amplitude_matrix(params, back_action=back_action)
    system = m[1:, 1:]
    source = -m[1:, 0]
    if np.linalg.cond(system) > 1e14:
        raise SingularSystemError("Steady-state amplitude system is singular for these parameters.")
    try:
        excited = np.linalg.solve(system, source)
    except np.linalg.LinAlgError as e:
        raise SingularSystemError(f"Steady-state amplitude system could not be solved: {e}") from e
    return AmplitudeState.from_vector(np.concatenate(([1.0], excited)))


def _require_symmetric(params: SystemParams):
    if not params.is_symmetric:
        raise ParameterError(
            "Closed-form amplitudes need delta_c = delta_m, kappa_c = kappa_m and theta = 0; "
            "use steady_amplitudes_linear for other parameters."
        )


def analytic_ingredients(params: SystemParams) -> AnalyticIngredients:
    _require_symmetric(params)
    mu, g, e, lam = params.mu, params.g_mc, params.drive, params.lam
    d = params.delta_m - 0.5j * params.kappa_m
    chi = g ** 2 + mu * d - d ** 2
    a_num = e ** 2 * d ** 2 * (2 * d - mu) - 1j * lam * chi * (chi - d ** 2)
    b_den = SQRT2 * chi * (d * (d - 2 * mu) * (2 * d - mu) - 2 * g ** 2 * (d - mu))
    c_num = g ** 2 * (2 * e ** 2 * (d - mu) + 1j * lam * chi)
    return AnalyticIngredients(d, chi, a_num, b_den, c_num, mu, g)


def steady_amplitudes_closed(params: SystemParams) -> AmplitudeState:
    """
    Closed-form stationary amplitudes with P00 = 1:
    P10 = E D'/chi, P01 = -g E/chi, P20 = -A/B, P02 = -C/B, P11 from its own line.

    The sign of P01 follows the amplitude equations; it does not enter g2.
    """
    ing = analytic_ingredients(params)
    if not params.weak_drive:
        logger.warning("Drive %.3g is not weak compared with the decay rates; closed forms assume |P00| ~ 1.", params.drive)
    if abs(ing.chi) < DEGENERACY_FLOOR or abs(ing.b_den) < DEGENERACY_FLOOR:
        raise DegenerateDenominatorError(
            f"Closed form is singular here: |chi| = {abs(ing.chi):.3e}, |B| = {abs(ing.b_den):.3e}."
        )
    e, g, mu, d = params.drive, params.g_mc, ing.mu, ing.delta_prime
    p10 = e * d / ing.chi
    p01 = -g * e / ing.chi
    p20 = -ing.a_num / ing.b_den
    p02 = -ing.c_num / ing.b_den
    p11_den = 2 * d - mu
    if abs(p11_den) < DEGENERACY_FLOOR:
        raise DegenerateDenominatorError("P11 line is degenerate (2 Delta' = mu).")
    p11 = -(SQRT2 * g * (p20 + p02) + e * p01) / p11_den
    return AmplitudeState(1.0, p10, p01, p11, p20, p02)


def g2_from_amplitudes(state: AmplitudeState, mode: Mode) -> float:
    one, two = (state.p10, state.p20) if Mode(mode) is Mode.MAGNON else (state.p01, state.p02)
    denominator = abs(one) ** 4
    if denominator < DEGENERACY_FLOOR:
        raise UnpopulatedModeError(f"Single-excitation {Mode(mode).value} amplitude vanishes, g2 is undefined.")
    return 2.0 * abs(two) ** 2 / denominator


def g2_analytic(params: SystemParams, mode: Mode) -> float:
    """g2_m(0) = 2|P20|^2/|P10|^4 or g2_c(0) = 2|P02|^2/|P01|^4 from the closed forms."""
    return g2_from_amplitudes(steady_amplitudes_closed(params), mode)


def g2_analytic_grid(params: SystemParams, deltas, lambdas, mode: Mode) -> np.ndarray:
    """
    Closed-form g2 on the mesh deltas x lambdas (shape (len(deltas), len(lambdas))).
    Detunings apply to both modes; degenerate points are NaN.
    """
    _require_symmetric(params.with_detuning(0.0))
    mode = Mode(mode)
    delta = np.asarray(deltas, dtype=float)[:, None]
    lam = np.asarray(lambdas, dtype=float)[None, :]
    mu, g, e = params.mu, params.g_mc, params.drive
    d = delta - 0.5j * params.kappa_m
    chi = g ** 2 + mu * d - d ** 2
    b_den = SQRT2 * chi * (d * (d - 2 * mu) * (2 * d - mu) - 2 * g ** 2 * (d - mu))
    if mode is Mode.MAGNON:
        num = e ** 2 * d ** 2 * (2 * d - mu) - 1j * lam * chi * (chi - d ** 2)
        one = e * d / chi
    else:
        num = g ** 2 * (2 * e ** 2 * (d - mu) + 1j * lam * chi)
        one = -g * e / chi
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = 2.0 * np.abs(num / b_den) ** 2 / np.abs(one) ** 4
    degenerate = (np.abs(chi) < DEGENERACY_FLOOR) | (np.abs(b_den) < DEGENERACY_FLOOR) \
        | (np.abs(one) ** 4 < DEGENERACY_FLOOR)
    return np.where(np.broadcast_to(degenerate, g2.shape), np.nan, g2)


def interference_lambda(params: SystemParams, delta: float, mode: Mode) -> complex:
    """
    Squeezing strength that cancels the two-excitation amplitude of `mode` at
    detuning `delta`. Only real, non-negative values are physical.
    """
    mu, g, e = params.mu, params.g_mc, params.drive
    d = delta - 0.5j * params.kappa_m
    chi = g ** 2 + mu * d - d ** 2
    if Mode(mode) is Mode.MAGNON:
        k = d * (2 * d - mu) - g ** 2
        return 1j * e ** 2 * d ** 2 * (2 * d - mu) / (chi * k)
    return 2j * e ** 2 * (d - mu) / chi


def interference_condition(params: SystemParams, mode: Mode, delta_bounds: Tuple[float, float],
                           n_grid: int = 4001) -> List[Tuple[float, float]]:
    """
    All (delta, lambda) pairs inside delta_bounds where the destructive
    interference condition has a real, non-negative squeezing solution.
    """
    _require_symmetric(params.with_detuning(0.0))
    lo, hi = delta_bounds
    grid = np.linspace(lo, hi, n_grid)

    def imag_part(x: float) -> float:
        return interference_lambda(params, x, mode).imag

    values = np.array([interference_lambda(params, x, mode) for x in grid])
    roots = []
    for k in range(n_grid - 1):
        a, b = values[k].imag, values[k + 1].imag
        if not (np.isfinite(a) and np.isfinite(b)) or a * b > 0:
            continue
        root = grid[k] if a == 0 else brentq(imag_part, grid[k], grid[k + 1], xtol=1e-14)
        lam = interference_lambda(params, root, mode)
        # sign changes through a pole leave a large imaginary part behind
        if abs(lam.imag) > 1e-8 * abs(lam) + 1e-15 or lam.real < 0:
            continue
        if roots and abs(roots[-1][0] - root) < 1e-12:
            continue
        roots.append((float(root), float(lam.real)))
    logger.debug("Interference condition (%s): %s", Mode(mode).value, roots)
    return roots
