from __future__ import annotations

import math

import numpy as np
import pytest

from grauert_tubes import Family, SpaceSpec, solve_potential

HALF_PI = math.pi / 2


@pytest.fixture(scope="session")
def hyp2():
    return SpaceSpec(Family.REAL_HYPERBOLIC, 2)


@pytest.fixture(scope="session")
def sphere2():
    return SpaceSpec(Family.ROUND_SPHERE, 2)


@pytest.fixture(scope="session")
def log_cos_solution(hyp2):
    """The lam = 3 potential on T^(pi/2) H^2, whose exact form is -log cos u."""
    return solve_potential(hyp2, 3.0, HALF_PI, probes=np.linspace(0.0, 1.5, 31))
