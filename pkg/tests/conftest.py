import numpy as np
import pytest

from torspec import CoefficientSet, _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile (or load from cache) the jitted kernels once per session so
    individual tests measure solve time, not JIT time."""
    _kernels.warm_up()


@pytest.fixture
def free_stub():
    """Zero drift, zero potential: psi'' = -eps psi, the harmonic stub."""
    return CoefficientSet(
        drift=lambda t: 0.0 * t,
        potential=lambda t: 0.0 * t,
        weight=lambda t: np.ones_like(np.asarray(t, dtype=float)),
        drift_period_integral=0.0,
    )


def rng(seed=0):
    return np.random.default_rng(seed)
