import numpy as np
import pytest

from magblock.core.model import SystemParams


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running end-to-end checks of the published trends")


@pytest.fixture
def reference_params():
    """kappa = omega_b = 1, E = 0.01, g_mb = 3, g_mc = 0.5 (mu = 9)."""
    return SystemParams.reference_point()


@pytest.fixture
def magnon_point():
    return SystemParams.reference_point(delta=9.03, lam=2e-4)


@pytest.fixture
def cavity_point():
    return SystemParams.reference_point(delta=-0.03, lam=4e-4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_dims():
    return 4, 4


@pytest.fixture
def random_symmetric_params(rng):
    def draw() -> SystemParams:
        kappa = rng.uniform(0.5, 2.0)
        delta = rng.uniform(-5.0, 5.0)
        return SystemParams(
            kappa_c=kappa,
            kappa_m=kappa,
            delta_c=delta,
            delta_m=delta,
            omega_b=rng.uniform(0.5, 2.0),
            g_mb=rng.uniform(0.0, 3.0),
            g_mc=rng.uniform(0.1, 1.0),
            lam=rng.uniform(0.0, 1e-3),
            drive=rng.uniform(1e-3, 1e-2),
        )

    return draw


@pytest.fixture
def free_oscillator_params(rng):
    """Random dissipative sets with mu = lambda = g_mc = 0."""
    def draw() -> SystemParams:
        kappa = rng.uniform(0.5, 2.0)
        delta = rng.uniform(-3.0, 3.0)
        return SystemParams(
            kappa_c=kappa,
            kappa_m=kappa,
            delta_c=delta,
            delta_m=delta,
            g_mb=0.0,
            g_mc=0.0,
            lam=0.0,
            drive=rng.uniform(1e-3, 1e-2),
        )

    return draw
