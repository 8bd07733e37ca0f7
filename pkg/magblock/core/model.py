# magblock/core/model.py
# Physical parameters, the Kerr-reduced Hamiltonian H1, its non-Hermitian
# counterpart H2, and the Lindblad dissipator.
#
# All quantities are dimensionless, in units of the cavity decay rate kappa.

from __future__ import annotations

import cmath
import dataclasses
from dataclasses import dataclass
from typing import Callable

import numpy as np

from magblock.core.errors import DimensionError, ParameterError
from magblock.core.operators import ComplexOperator, mode_operators

MIN_DIM = 3
DEFAULT_DIM = 6
WEAK_DRIVE_FRACTION = 0.1


@dataclass(frozen=True)
class SystemParams:
    """
    Rates, detunings and couplings of the two-mode model.

    `lam` is the squeezing strength lambda (`lambda` is a Python keyword).
    Decay rates may be zero for closed-system checks; operations that need a
    dissipative steady state check for positive rates themselves.
    """
    kappa_c: float = 1.0
    kappa_m: float = 1.0
    delta_c: float = 0.0
    delta_m: float = 0.0
    omega_b: float = 1.0
    g_mb: float = 3.0
    g_mc: float = 0.5
    lam: float = 0.0
    theta: float = 0.0
    drive: float = 0.01
    gamma_p: float = 0.0

    def __post_init__(self):
        for name in dataclasses.fields(self):
            value = getattr(self, name.name)
            if not np.isfinite(value):
                raise ParameterError(f"{name.name} must be finite, got {value}.")
        if self.omega_b <= 0:
            raise ParameterError(f"omega_b must be strictly positive, got {self.omega_b}.")
        for name in ("kappa_c", "kappa_m", "gamma_p", "g_mb", "g_mc", "lam", "drive"):
            if getattr(self, name) < 0:
                raise ParameterError(f"{name} must be non-negative, got {getattr(self, name)}.")

    @property
    def mu(self) -> float:
        return kerr_strength(self)

    @property
    def weak_drive(self) -> bool:
        """Advisory flag: the analytic amplitudes assume |P00| ~ 1."""
        rates = [k for k in (self.kappa_c, self.kappa_m) if k > 0]
        if not rates:
            return False
        return self.drive <= WEAK_DRIVE_FRACTION * min(rates)

    @property
    def is_symmetric(self) -> bool:
        """True when delta_c = delta_m, kappa_c = kappa_m and theta = 0."""
        return self.delta_c == self.delta_m and self.kappa_c == self.kappa_m and self.theta == 0.0

    @property
    def dissipative(self) -> bool:
        return self.kappa_c > 0 and self.kappa_m > 0

    def with_detuning(self, delta: float) -> "SystemParams":
        return dataclasses.replace(self, delta_c=delta, delta_m=delta)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def reference_point(cls, delta: float = 0.0, lam: float = 0.0) -> "SystemParams":
        """kappa_c = kappa_m = omega_b = 1, drive 0.01, g_mb = 3, g_mc = 0.5."""
        return cls(delta_c=delta, delta_m=delta, lam=lam)


def kerr_strength(params: SystemParams) -> float:
    """Kerr nonlinearity mu = g_mb^2 / omega_b inherited from the magnomechanical coupling."""
    if params.omega_b <= 0:
        raise ParameterError(f"omega_b must be strictly positive, got {params.omega_b}.")
    return params.g_mb ** 2 / params.omega_b


def check_dims(dim_m: int, dim_c: int):
    if dim_m < MIN_DIM or dim_c < MIN_DIM:
        raise DimensionError(
            f"Truncation ({dim_m}, {dim_c}) is too small: each mode needs at least {MIN_DIM} levels."
        )


def build_h1(params: SystemParams, dim_m: int = DEFAULT_DIM, dim_c: int = DEFAULT_DIM) -> ComplexOperator:
    """
    H1 = D_c c'c + D_m m'm + g_mc (m'c + c'm) - mu (m'm)^2
         + i lam (m'^2 e^{i theta} - m^2 e^{-i theta}) + E (m' + m)

    The Kerr term is kept as written, not normal-ordered.
    """
    check_dims(dim_m, dim_c)
    ops = mode_operators(dim_m, dim_c)
    m, c = ops.m, ops.c
    phase = cmath.exp(1j * params.theta)
    h = (
        params.delta_c * ops.n_c
        + params.delta_m * ops.n_m
        + params.g_mc * (m.H @ c + c.H @ m)
        - params.mu * (ops.n_m @ ops.n_m)
        + 1j * params.lam * (phase * (m.H @ m.H) - phase.conjugate() * (m @ m))
        + params.drive * (m.H + m)
    )
    return h


def build_h2(params: SystemParams, dim_m: int = DEFAULT_DIM, dim_c: int = DEFAULT_DIM) -> ComplexOperator:
    """Non-Hermitian H2 = H1 - i kappa_c/2 c'c - i kappa_m/2 m'm."""
    ops = mode_operators(dim_m, dim_c)
    return (
        build_h1(params, dim_m, dim_c)
        - (0.5j * params.kappa_c) * ops.n_c
        - (0.5j * params.kappa_m) * ops.n_m
    )


def dissipator(collapse: ComplexOperator, rate: float) -> Callable[[np.ndarray], np.ndarray]:
    """
    Returns the map rho -> (rate/2)(2 C rho C' - C'C rho - rho C'C) acting on
    dense density matrices. The vectorised form lives in `lindblad`.
    """
    if rate < 0:
        raise ParameterError(f"Dissipator rate must be non-negative, got {rate}.")
    c = collapse.data
    c_dag = c.conj().T
    c_dag_c = c_dag @ c

    def apply(rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho)
        if rho.shape != c.shape:
            raise DimensionError(f"State of shape {rho.shape} does not match collapse operator {c.shape}.")
        return 0.5 * rate * (2.0 * c @ rho @ c_dag - c_dag_c @ rho - rho @ c_dag_c)

    return apply
