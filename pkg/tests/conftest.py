import functools

import numpy as np
import pytest

from stefan_bim import (BoundaryCurve, Discretization, IterationConfig, LinearSlope,
                        builtin_example, run_iteration)


@functools.lru_cache(maxsize=None)
def converged(example: str, dxi: float, start: str = "extrapolate", tol: float = 1e-10):
    """Cached full fixed-point run on ``dt = dxi``."""
    from stefan_bim.operators import OperatorConfig
    spec, exact = builtin_example(example)
    disc = Discretization.from_steps(dxi)
    cfg = IterationConfig(tol=tol, max_iter=500, operator=OperatorConfig(0.5, start=start),
                          initial=LinearSlope(0.5))
    return spec, exact, disc, run_iteration(spec, disc, cfg)


@pytest.fixture
def example_ii():
    return builtin_example("ii")


@pytest.fixture
def example_i():
    return builtin_example("i")


def exact_curve(disc):
    return BoundaryCurve(disc.t.copy())


def rng(seed=0):
    return np.random.default_rng(seed)
