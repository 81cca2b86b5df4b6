"""Shared fixtures."""

import numpy as np
import pytest

from lieprop.algebra import AlgebraKind
from lieprop.dynamics import integrate_special_solution, uniform_grid
from lieprop.factorization import factorize


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=list(AlgebraKind), ids=lambda kind: kind.value)
def kind(request):
    return request.param


@pytest.fixture
def build_record():
    """Integrate and factorize a scenario on a uniform grid."""

    def _build(kind, field, a0, t_end=2.0, dt=1e-3):
        grid = uniform_grid(t_end, dt)
        trajectory = integrate_special_solution(kind, field, a0, grid)
        return trajectory, factorize(trajectory)

    return _build
