import numpy as np
import pytest

from magblock.core.amplitudes import g2_analytic
from magblock.core.errors import (
    DimensionError,
    IntegrationError,
    ParameterError,
    SteadyStateError,
    UnpopulatedModeError,
)
from magblock.core.integrators import LinearPropagator, check_time_grid
from magblock.core.lindblad import (
    DensityMatrix,
    build_liouvillian,
    collapse_operators,
    convergence_delta,
    evolve,
    g2_numeric,
    g2_tau,
    g2_zero,
    steady_state,
    trace_distance,
    unvec,
    vec,
)
from magblock.core.model import SystemParams, build_h1, dissipator
from magblock.core.operators import Mode


def test_column_stacking_identity(rng):
    a, x, b = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(3))
    np.testing.assert_allclose(vec(a @ x @ b), np.kron(b.T, a) @ vec(x), atol=1e-12)
    np.testing.assert_allclose(unvec(vec(x)), x)
    assert vec(x)[1] == x[1, 0]


def test_liouvillian_preserves_trace(magnon_point, small_dims):
    liouvillian = build_liouvillian(magnon_point, *small_dims, include_dephasing=True, dephasing_target="combined")
    assert liouvillian.matrix.shape == (256, 256)
    assert liouvillian.trace_row_residual() < 1e-12


def test_steady_state_is_physical(magnon_point):
    liouvillian = build_liouvillian(magnon_point, 5, 5)
    rho = steady_state(liouvillian)
    assert rho.report().ok()
    assert np.linalg.norm(liouvillian.matrix @ vec(rho.data)) <= 1e-10


def test_steady_state_needs_decay():
    liouvillian = build_liouvillian(SystemParams(kappa_c=0.0, kappa_m=0.0), 3, 3)
    with pytest.raises(SteadyStateError):
        steady_state(liouvillian)


def test_free_oscillator_is_coherent(free_oscillator_params):
    for _ in range(5):
        assert g2_numeric(free_oscillator_params(), Mode.MAGNON, 5, 3) == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("delta", [-1.0, 2.0, 5.0, 11.0])
def test_numeric_agrees_with_closed_form_away_from_dips(reference_params, delta):
    params = reference_params.with_detuning(delta).replace(lam=2e-4)
    numeric = g2_numeric(params, Mode.MAGNON)
    assert numeric == pytest.approx(g2_analytic(params, Mode.MAGNON), rel=0.1)


def test_evolution_relaxes_to_steady_state(magnon_point, small_dims):
    liouvillian = build_liouvillian(magnon_point, *small_dims)
    trajectory = evolve(liouvillian, DensityMatrix.vacuum(*small_dims), np.linspace(0.0, 40.0, 41))
    for rho in trajectory:
        assert rho.report().ok()
    assert trace_distance(trajectory[-1], steady_state(liouvillian)) < 1e-6


def test_rk4_matches_exponential(magnon_point):
    liouvillian = build_liouvillian(magnon_point, 3, 3)
    rho0 = DensityMatrix.vacuum(3, 3)
    grid = [0.0, 0.5, 1.0]
    exact = evolve(liouvillian, rho0, grid, method="expm")
    stepped = evolve(liouvillian, rho0, grid, method="rk4")
    for a, b in zip(exact, stepped):
        assert trace_distance(a, b) < 1e-6


def test_g2_tau_starts_at_equal_time_value(magnon_point, small_dims):
    liouvillian = build_liouvillian(magnon_point, *small_dims)
    expected = g2_zero(steady_state(liouvillian), Mode.MAGNON)
    curve = g2_tau(magnon_point, [0.0, 1.0, 60.0], Mode.MAGNON, liouvillian=liouvillian)
    assert curve.points[0].g2 == pytest.approx(expected, rel=1e-8)
    assert curve.points[-1].g2 == pytest.approx(1.0, abs=1e-3)
    assert curve.points[1].g2 > curve.points[0].g2


def test_zero_rate_dephasing_is_a_no_op(magnon_point, small_dims):
    plain = g2_numeric(magnon_point, Mode.MAGNON, *small_dims)
    dephased = g2_numeric(magnon_point, Mode.MAGNON, *small_dims, include_dephasing=True, dephasing_target="combined")
    assert dephased == pytest.approx(plain, rel=1e-10)


def test_dephasing_spoils_the_magnon_dip(magnon_point, small_dims):
    clean = g2_numeric(magnon_point, Mode.MAGNON, *small_dims)
    noisy = g2_numeric(magnon_point.replace(gamma_p=0.5), Mode.MAGNON, *small_dims,
                       include_dephasing=True, dephasing_target="magnon")
    assert noisy > clean


def test_dephasing_target_is_validated(reference_params):
    with pytest.raises(ParameterError):
        collapse_operators(reference_params, 3, 3, include_dephasing=True, dephasing_target="phonon")
    channels = collapse_operators(reference_params.replace(gamma_p=0.1), 3, 3, True, "combined")
    assert len(channels) == 4


def test_truncation_convergence(reference_params):
    params = reference_params.with_detuning(2.0).replace(lam=2e-4)
    assert convergence_delta(params, Mode.MAGNON, (4, 4), (5, 5)) < 1e-4


def test_vacuum_has_undefined_g2():
    with pytest.raises(UnpopulatedModeError):
        g2_zero(DensityMatrix.vacuum(3, 3), Mode.CAVITY)


def test_state_dimensions_are_checked(reference_params):
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(4), (3, 3))
    liouvillian = build_liouvillian(reference_params, 3, 3)
    with pytest.raises(DimensionError):
        evolve(liouvillian, DensityMatrix.vacuum(3, 4), [0.0, 1.0])


def test_population_helpers():
    rho = DensityMatrix.from_populations({(0, 0): 0.5, (2, 1): 0.25, (0, 2): 0.25}, 3, 3)
    assert rho.trace_error() == pytest.approx(0.0)
    assert rho.population(2, 1) == pytest.approx(0.25)
    assert rho.top_level_population() == pytest.approx(0.5)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-14)


def test_linear_propagator_on_scalar_decay():
    grid = np.linspace(0.0, 2.0, 5)
    generator = np.array([[-1.0]])
    rk4 = LinearPropagator(generator, method="rk4", max_step=0.01, richardson_tol=1e-8).run([1.0], grid)
    np.testing.assert_allclose(rk4[:, 0].real, np.exp(-grid), rtol=1e-8)
    exact = LinearPropagator(generator, method="expm").run([1.0], grid)
    np.testing.assert_allclose(exact[:, 0].real, np.exp(-grid), rtol=1e-12)


def test_step_halving_check_catches_coarse_steps():
    with pytest.raises(IntegrationError):
        LinearPropagator(np.array([[-5.0]]), method="rk4", max_step=1.0, richardson_tol=1e-10).run([1.0], [0.0, 1.0])


def test_time_grid_validation():
    with pytest.raises(ValueError):
        check_time_grid([0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        check_time_grid([1.0, 2.0], require_zero_start=True)


def test_liouvillian_matches_matrix_form(magnon_point, rng):
    params = magnon_point.replace(gamma_p=0.3, kappa_m=0.7)
    liouvillian = build_liouvillian(params, 3, 4, include_dephasing=True, dephasing_target="combined")
    x = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    rho = DensityMatrix(x @ x.conj().T / np.trace(x @ x.conj().T), (3, 4))
    h = build_h1(params, 3, 4).data
    expected = -1j * (h @ rho.data - rho.data @ h)
    for op, rate in collapse_operators(params, 3, 4, True, "combined"):
        expected = expected + dissipator(op, rate)(rho.data)
    np.testing.assert_allclose(liouvillian.apply(rho), expected, atol=1e-12)


def test_single_excitation_is_antibunched():
    assert g2_zero(DensityMatrix.from_populations({(1, 0): 1.0}, 3, 3), Mode.MAGNON) == 0.0


def test_steady_state_leaves_top_level_empty(magnon_point):
    rho = steady_state(build_liouvillian(magnon_point))
    assert rho.top_level_population() < 1e-8
