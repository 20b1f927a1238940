import numpy as np
import pytest

from rydfloq.floquet import floquet_decompose
from rydfloq.propagation import monodromy_grid


def decompose_at(params, n_atoms, symmetric=False, steps=384):
    """One-period decomposition via the fixed-step propagator (fast path)."""
    u = monodromy_grid(
        params.rabi, params.delta0, params.delta_mod, params.v0, params.omega,
        n_atoms, symmetric, steps,
    )
    return floquet_decompose(u, params.omega)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
