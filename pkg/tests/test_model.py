import numpy as np
import pytest

from magblock.core.errors import DimensionError, ParameterError
from magblock.core.model import SystemParams, build_h1, build_h2, check_dims, dissipator, kerr_strength
from magblock.core.operators import basis_index, mode_operators


def test_kerr_strength(reference_params):
    assert kerr_strength(reference_params) == pytest.approx(9.0)
    assert reference_params.mu == pytest.approx(9.0)


@pytest.mark.parametrize("changes", [
    {"omega_b": 0.0},
    {"kappa_c": -1.0},
    {"gamma_p": -0.1},
    {"drive": float("nan")},
    {"lam": float("inf")},
])
def test_invalid_parameters(changes):
    with pytest.raises(ParameterError):
        SystemParams(**changes)


def test_zero_decay_is_allowed_but_not_dissipative():
    params = SystemParams(kappa_c=0.0, kappa_m=0.0)
    assert not params.dissipative
    assert not params.weak_drive


def test_with_detuning_sets_both_modes(reference_params):
    params = reference_params.with_detuning(2.5)
    assert params.delta_c == params.delta_m == 2.5
    assert params.is_symmetric
    assert not params.replace(theta=0.3).is_symmetric


def test_h1_is_hermitian():
    params = SystemParams(delta_c=1.3, delta_m=-0.4, lam=1e-3, theta=0.7, drive=0.05)
    h = build_h1(params, 4, 5).data
    np.testing.assert_allclose(h, h.conj().T, atol=1e-13)


def test_h1_kerr_diagonal():
    params = SystemParams(g_mc=0.0, drive=0.0)
    h = build_h1(params, 4, 3).data
    for q in range(4):
        k = basis_index(q, 0, 3)
        assert h[k, k].real == pytest.approx(-params.mu * q ** 2)


def test_h2_antihermitian_part_is_decay():
    params = SystemParams(kappa_c=1.0, kappa_m=0.4, delta_c=0.3, delta_m=0.3, lam=1e-3)
    h2 = build_h2(params, 3, 3).data
    ops = mode_operators(3, 3)
    decay = (h2 - h2.conj().T) / 2j
    np.testing.assert_allclose(decay, -(0.5 * ops.n_c.data + 0.2 * ops.n_m.data), atol=1e-13)


def test_dissipator_is_trace_preserving(rng):
    ops = mode_operators(3, 3)
    x = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    rho = x @ x.conj().T
    rho /= np.trace(rho)
    d = dissipator(ops.m, 0.7)(rho)
    assert abs(np.trace(d)) < 1e-13
    with pytest.raises(ParameterError):
        dissipator(ops.m, -1.0)


def test_truncation_floor():
    check_dims(3, 3)
    with pytest.raises(DimensionError):
        check_dims(2, 6)
    with pytest.raises(DimensionError):
        build_h1(SystemParams(), 6, 2)


def test_h1_squeezing_creates_magnon_pairs():
    params = SystemParams(lam=2e-4, drive=0.01)
    h = build_h1(params, 4, 4).data
    assert h[basis_index(2, 0, 4), basis_index(0, 0, 4)] == pytest.approx(1j * 2e-4 * np.sqrt(2), abs=1e-18)


def test_cavity_decay_empties_one_photon():
    ops = mode_operators(3, 3)
    rho = np.zeros((9, 9), dtype=complex)
    rho[basis_index(0, 1, 3), basis_index(0, 1, 3)] = 1.0
    expected = np.zeros((9, 9), dtype=complex)
    expected[basis_index(0, 0, 3), basis_index(0, 0, 3)] = 0.8
    expected[basis_index(0, 1, 3), basis_index(0, 1, 3)] = -0.8
    np.testing.assert_allclose(dissipator(ops.c, 0.8)(rho), expected, atol=1e-15)
