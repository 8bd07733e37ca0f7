# magblock/core/lindblad.py
# Master-equation numerics on the truncated two-mode space: Liouvillian,
# steady state, time evolution and second-order correlation functions.
#
# Vectorisation is column stacking: vec(A X B) = (B^T (x) A) vec(X), and
# vec(rho)[i + j*d] = rho[i, j].

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import LinAlgError, LinAlgWarning, eigvalsh, solve

from magblock.core.curves import CorrelationCurve
from magblock.core.errors import (
    DimensionError,
    ParameterError,
    SteadyStateError,
    UnpopulatedModeError,
)
from magblock.core.integrators import LinearPropagator, check_time_grid
from magblock.core.model import DEFAULT_DIM, SystemParams, check_dims, build_h1
from magblock.core.operators import ComplexOperator, Mode, basis_index, mode_operators

logger = logging.getLogger(__name__)

OCCUPATION_FLOOR = 1e-20
STEADY_RESIDUAL_WARN = 1e-10
STEADY_RESIDUAL_FAIL = 1e-6
RK4_BASE_STEP = 0.005
RK4_NORM_STEP = 0.1
DEPHASING_TARGETS = ("cavity", "magnon", "combined")


def vec(matrix: np.ndarray) -> np.ndarray:
    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray) -> np.ndarray:
    d = int(round(np.sqrt(vector.size)))
    return np.asarray(vector).reshape((d, d), order="F")


@dataclass(frozen=True)
class PhysicalityReport:
    trace_error: float
    hermiticity_error: float
    min_eigenvalue: float

    def ok(self, trace_tol: float = 1e-8, hermiticity_tol: float = 1e-8, eigen_tol: float = 1e-6) -> bool:
        return (self.trace_error <= trace_tol and self.hermiticity_error <= hermiticity_tol
                and self.min_eigenvalue >= -eigen_tol)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Density matrix on the magnon (x) cavity space."""
    data: np.ndarray
    dims: Tuple[int, int]

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        d = self.dims[0] * self.dims[1]
        if data.shape != (d, d):
            raise DimensionError(f"Density matrix has shape {data.shape}, expected ({d}, {d}).")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @classmethod
    def from_populations(cls, populations: Dict[Tuple[int, int], float], dim_m: int, dim_c: int) -> "DensityMatrix":
        """Diagonal state with weight p on |q, r> for each ((q, r), p) item."""
        data = np.zeros((dim_m * dim_c, dim_m * dim_c), dtype=complex)
        for (q, r), p in populations.items():
            k = basis_index(q, r, dim_c)
            data[k, k] = p
        return cls(data, (dim_m, dim_c))

    @classmethod
    def vacuum(cls, dim_m: int, dim_c: int) -> "DensityMatrix":
        return cls.from_populations({(0, 0): 1.0}, dim_m, dim_c)

    def trace_error(self) -> float:
        return abs(complex(np.trace(self.data)) - 1.0)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.data - self.data.conj().T)))

    def min_eigenvalue(self) -> float:
        hermitian = 0.5 * (self.data + self.data.conj().T)
        return float(eigvalsh(hermitian)[0])

    def report(self) -> PhysicalityReport:
        return PhysicalityReport(self.trace_error(), self.hermiticity_error(), self.min_eigenvalue())

    def population(self, q: int, r: int) -> float:
        k = basis_index(q, r, self.dims[1])
        return float(self.data[k, k].real)

    def top_level_population(self) -> float:
        """Total population on the highest Fock level of either mode."""
        dim_m, dim_c = self.dims
        diag = np.real(np.diag(self.data)).reshape(dim_m, dim_c)
        return float(diag[-1, :].sum() + diag[:, -1].sum() - diag[-1, -1])


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """Column-stacking superoperator of the master equation with its provenance."""
    matrix: np.ndarray
    dims: Tuple[int, int]
    params: SystemParams
    include_dephasing: bool = False
    dephasing_target: str = "cavity"
    provenance: Dict[str, object] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.dims[0] * self.dims[1]

    def apply(self, rho: DensityMatrix) -> np.ndarray:
        if rho.dims != self.dims:
            raise DimensionError(f"State dims {rho.dims} do not match Liouvillian dims {self.dims}.")
        return unvec(self.matrix @ vec(rho.data))

    def trace_row_residual(self) -> float:
        """max |vec(1)^T L|, zero for a trace-preserving generator."""
        return float(np.max(np.abs(vec(np.eye(self.dim)) @ self.matrix)))


def _commutator_superop(h: np.ndarray) -> np.ndarray:
    eye = np.eye(h.shape[0])
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def dissipator_superop(collapse: np.ndarray, rate: float) -> np.ndarray:
    """(rate/2)(2 conj(C) (x) C - 1 (x) C'C - (C'C)^T (x) 1)."""
    if rate < 0:
        raise ParameterError(f"Dissipator rate must be non-negative, got {rate}.")
    eye = np.eye(collapse.shape[0])
    c_dag_c = collapse.conj().T @ collapse
    return 0.5 * rate * (2.0 * np.kron(collapse.conj(), collapse)
                         - np.kron(eye, c_dag_c) - np.kron(c_dag_c.T, eye))


def collapse_operators(params: SystemParams, dim_m: int, dim_c: int, include_dephasing: bool = False,
                       dephasing_target: str = "cavity") -> List[Tuple[ComplexOperator, float]]:
    """(operator, rate) pairs: m at kappa_m, c at kappa_c and, when enabled, number operators at gamma_p."""
    if dephasing_target not in DEPHASING_TARGETS:
        raise ParameterError(f"dephasing_target must be one of {DEPHASING_TARGETS}, got '{dephasing_target}'.")
    ops = mode_operators(dim_m, dim_c)
    channels = [(ops.m, params.kappa_m), (ops.c, params.kappa_c)]
    if include_dephasing:
        if dephasing_target in ("cavity", "combined"):
            channels.append((ops.n_c, params.gamma_p))
        if dephasing_target in ("magnon", "combined"):
            channels.append((ops.n_m, params.gamma_p))
    return channels


def build_liouvillian(params: SystemParams, dim_m: int = DEFAULT_DIM, dim_c: int = DEFAULT_DIM,
                      include_dephasing: bool = False, dephasing_target: str = "cavity") -> Liouvillian:
    """
    L = -i(1 (x) H1 - H1^T (x) 1) + D[m](kappa_m) + D[c](kappa_c) (+ D[n](gamma_p)).
    Zero temperature: no thermal occupation terms.
    """
    check_dims(dim_m, dim_c)
    h1 = build_h1(params, dim_m, dim_c).data
    matrix = _commutator_superop(h1)
    for op, rate in collapse_operators(params, dim_m, dim_c, include_dephasing, dephasing_target):
        if rate > 0:
            matrix = matrix + dissipator_superop(op.data, rate)
    logger.debug("Built Liouvillian of size %d for dims (%d, %d), dephasing=%s/%s",
                 matrix.shape[0], dim_m, dim_c, include_dephasing, dephasing_target)
    return Liouvillian(
        matrix=matrix,
        dims=(dim_m, dim_c),
        params=params,
        include_dephasing=include_dephasing,
        dephasing_target=dephasing_target,
        provenance={"dim_m": dim_m, "dim_c": dim_c, "gamma_p": params.gamma_p if include_dephasing else 0.0,
                    "vectorization": "column-stacking"},
    )


def _hermitize(data: np.ndarray) -> np.ndarray:
    data = 0.5 * (data + data.conj().T)
    return data / np.trace(data).real


def steady_state(liouvillian: Liouvillian) -> DensityMatrix:
    """
    Solves L vec(rho) = 0 with the first equation replaced by Tr(rho) = 1.
    """
    if not liouvillian.params.dissipative:
        raise SteadyStateError("Steady state is not unique without decay: kappa_c and kappa_m must be positive.")
    d = liouvillian.dim
    system = liouvillian.matrix.copy()
    system[0, :] = vec(np.eye(d))
    rhs = np.zeros(d * d, dtype=complex)
    rhs[0] = 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", LinAlgWarning)
        try:
            solution = solve(system, rhs)
        except LinAlgWarning as e:
            rcond = 1.0 / np.linalg.cond(system, 1)
            raise SteadyStateError(f"Steady-state system is ill-conditioned: {e}", rcond) from e
        except LinAlgError as e:
            raise SteadyStateError(f"Steady-state system is singular: {e}", 0.0) from e

    rho = _hermitize(unvec(solution))
    residual = float(np.linalg.norm(liouvillian.matrix @ vec(rho)))
    if residual > STEADY_RESIDUAL_FAIL:
        raise SteadyStateError(f"Steady-state residual {residual:.3e} is too large")
    if residual > STEADY_RESIDUAL_WARN:
        logger.warning("Steady-state residual %.3e exceeds %.0e", residual, STEADY_RESIDUAL_WARN)
    return DensityMatrix(rho, liouvillian.dims)


def _reference_rate(params: SystemParams) -> float:
    rates = [k for k in (params.kappa_c, params.kappa_m) if k > 0]
    return min(rates) if rates else 1.0


def _propagator(liouvillian: Liouvillian, method: str) -> LinearPropagator:
    if method == "expm":
        return LinearPropagator(liouvillian.matrix, method="expm")
    dt = RK4_BASE_STEP / _reference_rate(liouvillian.params)
    norm = float(np.linalg.norm(liouvillian.matrix, 1))
    if norm * dt > RK4_NORM_STEP:
        dt = RK4_NORM_STEP / norm
    return LinearPropagator(liouvillian.matrix, method="rk4", max_step=dt)


def evolve(liouvillian: Liouvillian, rho0: DensityMatrix, t_grid, method: str = "expm") -> List[DensityMatrix]:
    """Trajectory of rho0 (at t_grid[0]) under the master equation at every grid point."""
    if rho0.dims != liouvillian.dims:
        raise DimensionError(f"Initial state dims {rho0.dims} do not match Liouvillian dims {liouvillian.dims}.")
    t_grid = check_time_grid(t_grid)
    rows = _propagator(liouvillian, method).run(vec(rho0.data), t_grid)
    trajectory = [DensityMatrix(unvec(row), liouvillian.dims) for row in rows]
    worst = max(state.trace_error() for state in trajectory)
    if worst > 1e-8:
        logger.warning("Trace drifted by %.3e along the trajectory", worst)
    return trajectory


def expectation(op: ComplexOperator, rho: DensityMatrix) -> complex:
    """Tr(op rho)."""
    if op.dims != rho.dims:
        raise DimensionError(f"Operator dims {op.dims} do not match state dims {rho.dims}.")
    return complex(np.einsum("ij,ji->", op.data, rho.data))


def occupation(rho: DensityMatrix, mode: Mode) -> float:
    ops = mode_operators(*rho.dims)
    return expectation(ops.number(mode), rho).real


def g2_zero(rho: DensityMatrix, mode: Mode) -> float:
    """<a'a'aa>/<a'a>^2 for the lowering operator a of `mode`."""
    ops = mode_operators(*rho.dims)
    a = ops.lowering(mode)
    n = expectation(ops.number(mode), rho).real
    if n < OCCUPATION_FLOOR:
        raise UnpopulatedModeError(f"{Mode(mode).value} occupation {n:.3e} is below the floor, g2 is undefined.")
    pairs = expectation(a.H @ a.H @ a @ a, rho).real
    return max(pairs, 0.0) / n ** 2


def g2_tau(params: SystemParams, tau_grid: Sequence[float], mode: Mode, dim_m: int = DEFAULT_DIM,
           dim_c: int = DEFAULT_DIM, liouvillian: Optional[Liouvillian] = None,
           include_dephasing: bool = False, dephasing_target: str = "cavity",
           method: str = "expm") -> CorrelationCurve:
    """
    Stationary delayed correlation by quantum regression:
    g2(tau) = Tr[a'a e^{L tau}(a rho_ss a')] / <a'a>_ss^2.
    """
    mode = Mode(mode)
    tau = check_time_grid(tau_grid)
    if tau[0] < 0:
        raise ValueError("Delays must be non-negative.")
    if liouvillian is None:
        liouvillian = build_liouvillian(params, dim_m, dim_c, include_dephasing, dephasing_target)
    rho = steady_state(liouvillian)
    ops = mode_operators(*liouvillian.dims)
    a = ops.lowering(mode).data
    number_op = ops.number(mode).data
    n = expectation(ops.number(mode), rho).real
    if n < OCCUPATION_FLOOR:
        raise UnpopulatedModeError(f"{mode.value} occupation {n:.3e} is below the floor, g2 is undefined.")

    grid = tau if tau[0] == 0.0 else np.concatenate(([0.0], tau))
    seed = a @ rho.data @ a.conj().T
    rows = _propagator(liouvillian, method).run(vec(seed), grid)
    if tau[0] != 0.0:
        rows = rows[1:]
    values = [np.einsum("ij,ji->", number_op, unvec(row)).real / n ** 2 for row in rows]
    return CorrelationCurve.from_values(
        f"g2_tau_{mode.value}", tau, np.maximum(values, 0.0),
        params=params.as_dict(),
        metadata={"engine": "numeric", "method": method, "dims": f"{liouvillian.dims[0]}x{liouvillian.dims[1]}"},
    )


def g2_numeric(params: SystemParams, mode: Mode, dim_m: int = DEFAULT_DIM, dim_c: int = DEFAULT_DIM,
               include_dephasing: bool = False, dephasing_target: str = "cavity") -> float:
    """Steady-state g2(0) straight from parameters."""
    liouvillian = build_liouvillian(params, dim_m, dim_c, include_dephasing, dephasing_target)
    return g2_zero(steady_state(liouvillian), mode)


def convergence_delta(params: SystemParams, mode: Mode, dims_low: Tuple[int, int] = (6, 6),
                      dims_high: Tuple[int, int] = (8, 8), include_dephasing: bool = False,
                      dephasing_target: str = "cavity") -> float:
    """Relative change of the steady-state g2(0) between two truncations."""
    low = g2_numeric(params, mode, *dims_low, include_dephasing, dephasing_target)
    high = g2_numeric(params, mode, *dims_high, include_dephasing, dephasing_target)
    return abs(high - low) / abs(high)


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    if rho.dims != sigma.dims:
        raise DimensionError(f"States have different dims {rho.dims} and {sigma.dims}.")
    diff = rho.data - sigma.data
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(eigvalsh(diff))))
