"""Shared fixtures for the test suite."""

import numpy as np
import pytest

from ptslcp.problem import GeneratorConfig, generate_random
from ptslcp.target_space import Iterate, TargetPoint


def make_interior_iterate(problem, pair, rng, *, walk_scale=0.2, spread=0.9):
    """Build a strictly interior iterate that sits off the central path.

    Starting from a feasible pair, take a random feasible walk in x, then
    perturb the lifted target so the residual vector is uneven.  Every
    residual stays positive by construction: the component residuals land
    in [0.1 * xi, 1.9 * xi] (or keep their product value when clamped) and
    the gap residual equals u0 * xi with u0 drawn from [0.2, 1.8].
    """
    x = np.array(pair.x, dtype=float)
    step = rng.standard_normal(problem.n)
    norm = float(np.linalg.norm(step))
    if norm > 0.0:
        step *= walk_scale * float(np.linalg.norm(x)) / norm
        for _ in range(60):
            cand = x + step
            slack = problem.M @ cand + problem.q
            if cand.min() > 0.0 and slack.min() > 0.0:
                x = cand
                break
            step *= 0.5
    s = problem.M @ x + problem.q
    xs = x * s
    xi = float(xs.min())
    theta = rng.uniform(-1.0, 1.0, problem.n)
    v_sq = np.maximum(xs - xi + spread * theta * xi, 0.0)
    u0 = float(rng.uniform(0.2, 1.8))
    v0 = float(xs.sum()) + u0 * xi
    w = TargetPoint(v0=v0, v=np.sqrt(v_sq))
    return Iterate.from_point(x, s, w)


@pytest.fixture
def interior_case():
    """A generated problem with a random off-center interior iterate."""
    problem, pair = generate_random(GeneratorConfig(n=8, seed=3))
    rng = np.random.default_rng(11)
    return problem, make_interior_iterate(problem, pair, rng)


@pytest.fixture
def small_problem():
    problem, pair = generate_random(GeneratorConfig(n=4, seed=0))
    return problem, pair
