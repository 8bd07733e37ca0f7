# magblock/core/operators.py
# Dense complex operators on the truncated magnon (x) cavity Fock space.
#
# Tensor order is fixed: magnon is the left Kronecker factor, cavity the right,
# so basis state |q, r> (q magnons, r photons) has index q * dim_c + r.

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from magblock.core.errors import DimensionError


class Mode(str, Enum):
    MAGNON = "magnon"
    CAVITY = "cavity"


@dataclass(frozen=True, eq=False)
class ComplexOperator:
    """
    Immutable dense complex matrix with dimension metadata.

    `dims` is `(n,)` for a single-mode operator (optionally tagged with `mode`)
    and `(dim_m, dim_c)` for an operator on the two-mode space.
    """
    data: np.ndarray
    dims: Tuple[int, ...]
    mode: Optional[Mode] = None
    dim: int = field(init=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        total = int(np.prod(self.dims))
        if data.shape != (total, total):
            raise DimensionError(
                f"Operator data has shape {data.shape}, expected ({total}, {total}) for dims {self.dims}."
            )
        data.flags.writeable = False
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dim", total)

    @property
    def dim_m(self) -> int:
        return self.dims[0]

    @property
    def dim_c(self) -> int:
        return self.dims[-1]

    def __add__(self, other: "ComplexOperator") -> "ComplexOperator":
        return add(self, other)

    def __sub__(self, other: "ComplexOperator") -> "ComplexOperator":
        return add(self, scale(other, -1.0))

    def __matmul__(self, other: "ComplexOperator") -> "ComplexOperator":
        return matmul(self, other)

    def __mul__(self, factor: complex) -> "ComplexOperator":
        return scale(self, factor)

    __rmul__ = __mul__

    @property
    def H(self) -> "ComplexOperator":
        return adjoint(self)


def _check_conforming(a: ComplexOperator, b: ComplexOperator, what: str):
    if a.dims != b.dims:
        raise DimensionError(f"Cannot {what} operators with dims {a.dims} and {b.dims}.")


def _like(template: ComplexOperator, data: np.ndarray) -> ComplexOperator:
    return ComplexOperator(data, template.dims, template.mode)


def annihilation(n_levels: int) -> ComplexOperator:
    """Bosonic lowering operator with sqrt(k) on the first superdiagonal."""
    if n_levels < 2:
        raise DimensionError(f"annihilation needs at least 2 levels, got {n_levels}.")
    return ComplexOperator(np.diag(np.sqrt(np.arange(1, n_levels)), k=1), (n_levels,))


def identity(n_levels: int) -> ComplexOperator:
    return ComplexOperator(np.eye(n_levels), (n_levels,))


def number(n_levels: int) -> ComplexOperator:
    return ComplexOperator(np.diag(np.arange(n_levels)), (n_levels,))


def embed(op: ComplexOperator, mode: Mode, dim_m: int, dim_c: int) -> ComplexOperator:
    """Lift a single-mode operator onto the two-mode space as op (x) 1 or 1 (x) op."""
    mode = Mode(mode)
    if len(op.dims) != 1:
        raise DimensionError(f"Only single-mode operators can be embedded, got dims {op.dims}.")
    expected = dim_m if mode is Mode.MAGNON else dim_c
    if op.dim != expected:
        raise DimensionError(
            f"{mode.value} operator has dimension {op.dim}, but the {mode.value} space has dimension {expected}."
        )
    if mode is Mode.MAGNON:
        data = np.kron(op.data, np.eye(dim_c))
    else:
        data = np.kron(np.eye(dim_m), op.data)
    return ComplexOperator(data, (dim_m, dim_c), mode)


def add(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    _check_conforming(a, b, "add")
    mode = a.mode if a.mode == b.mode else None
    return ComplexOperator(a.data + b.data, a.dims, mode)


def scale(a: ComplexOperator, factor: complex) -> ComplexOperator:
    return _like(a, complex(factor) * a.data)


def matmul(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    _check_conforming(a, b, "multiply")
    mode = a.mode if a.mode == b.mode else None
    return ComplexOperator(a.data @ b.data, a.dims, mode)


def adjoint(a: ComplexOperator) -> ComplexOperator:
    return _like(a, a.data.conj().T)


def trace(a: ComplexOperator) -> complex:
    return complex(np.trace(a.data))


def kron(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    return ComplexOperator(np.kron(a.data, b.data), a.dims + b.dims)


def commutator(a: ComplexOperator, b: ComplexOperator) -> ComplexOperator:
    _check_conforming(a, b, "commute")
    return ComplexOperator(a.data @ b.data - b.data @ a.data, a.dims)


def basis_index(q: int, r: int, dim_c: int) -> int:
    """Index of |q, r> in the magnon (x) cavity product basis."""
    return q * dim_c + r


@dataclass(frozen=True)
class ModeOperators:
    """The embedded ladder and number operators of both modes for one truncation."""
    m: ComplexOperator
    c: ComplexOperator
    n_m: ComplexOperator
    n_c: ComplexOperator
    eye: ComplexOperator

    @property
    def dims(self) -> Tuple[int, int]:
        return self.eye.dims

    def lowering(self, mode: Mode) -> ComplexOperator:
        return self.m if Mode(mode) is Mode.MAGNON else self.c

    def number(self, mode: Mode) -> ComplexOperator:
        return self.n_m if Mode(mode) is Mode.MAGNON else self.n_c


def mode_operators(dim_m: int, dim_c: int) -> ModeOperators:
    m = embed(annihilation(dim_m), Mode.MAGNON, dim_m, dim_c)
    c = embed(annihilation(dim_c), Mode.CAVITY, dim_m, dim_c)
    return ModeOperators(
        m=m,
        c=c,
        n_m=m.H @ m,
        n_c=c.H @ c,
        eye=ComplexOperator(np.eye(dim_m * dim_c), (dim_m, dim_c)),
    )
