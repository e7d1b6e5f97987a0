import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefan_bim.experiments import error_Ekn, order_p
from stefan_bim.fixed_boundary import (SolverError, TridiagonalSystem, assemble_step,
                                       solve_fixed_boundary, step_coefficients, thomas_solve)
from stefan_bim.grid import BoundaryCurve, Discretization
from stefan_bim.problem import Neumann, ProblemSpec, builtin_example

from conftest import exact_curve


def random_dominant(rng, n):
    sub = rng.uniform(-1, 1, n)
    sup = rng.uniform(-1, 1, n)
    sub[0] = sup[-1] = 0.0
    diag = (np.abs(sub) + np.abs(sup) + rng.uniform(0.5, 2, n)) * rng.choice([-1, 1], n)
    return TridiagonalSystem(sub, diag, sup, rng.normal(size=n))


def test_rho_example():
    disc = Discretization.from_steps(0.1)
    curve = BoundaryCurve([0.0] + [1.0] * disc.M)
    c = step_coefficients(disc, curve, 5)
    assert c.rho == pytest.approx(0.2)
    np.testing.assert_array_equal(c.sigma, 0.0)


def test_hand_assembled_neumann_step():
    spec = ProblemSpec(Neumann(1.0))
    disc = Discretization(2, 1, T=0.1)
    curve = BoundaryCurve([0.0, 0.1])
    sys_ = assemble_step(spec, disc, curve, np.zeros((3, 2)), 1)
    # z_mid = 0.005, rho = 0.005 * 2 * 0.25 / 0.1, sigma_i = xi_i * 0.1 * 0.5 / 4
    rho = 0.025
    sig1 = 0.5 * 0.0125
    expected = np.array([[-(2 + rho), 2.0, 0.0],
                         [1 - sig1, -(2 + rho), 1 + sig1],
                         [0.0, 0.0, -(2 + rho)]])
    np.testing.assert_allclose(sys_.dense(), expected, rtol=1e-14)
    np.testing.assert_allclose(sys_.rhs, [-2 * 0.5 * 0.1, 0.0, 0.0], atol=1e-15)


def test_assemble_errors():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.1)
    curve = exact_curve(disc)
    F = np.zeros((11, 11))
    with pytest.raises(SolverError):
        assemble_step(spec, disc, curve, F, 0)
    with pytest.raises(SolverError):
        assemble_step(spec, disc, BoundaryCurve([0.0, 1.0]), F, 1)


def test_thomas_small_cases():
    x = thomas_solve(TridiagonalSystem([0, 1.0], [2.0, 2.0], [1.0, 0], [3.0, 3.0]))
    np.testing.assert_allclose(x, [1.0, 1.0])
    r = np.arange(5.0)
    np.testing.assert_allclose(thomas_solve(TridiagonalSystem(np.zeros(5), np.ones(5),
                                                              np.zeros(5), r)), r)
    with pytest.raises(SolverError, match="row 0"):
        thomas_solve(TridiagonalSystem([0, 1.0], [0.0, 1.0], [1.0, 0], [1.0, 1.0]))


def test_thomas_matches_dense_oracle():
    rng = np.random.default_rng(7)
    for k in range(50):
        sys_ = random_dominant(rng, int(rng.integers(2, 40)))
        x = thomas_solve(sys_)
        np.testing.assert_allclose(x, np.linalg.solve(sys_.dense(), sys_.rhs), atol=1e-10)


@settings(max_examples=40)
@given(st.integers(0, 2 ** 32 - 1), st.integers(2, 60))
def test_thomas_residual_property(seed, n):
    sys_ = random_dominant(np.random.default_rng(seed), n)
    x = thomas_solve(sys_)
    assert np.max(np.abs(sys_.matvec(x) - sys_.rhs)) <= 1e-10 * (1 + np.max(np.abs(sys_.rhs)))


def test_zero_flux_gives_zero_field():
    spec = ProblemSpec(Neumann(0.0), check=False)
    disc = Discretization.from_steps(0.1)
    F = solve_fixed_boundary(spec, disc, exact_curve(disc))
    assert np.all(F.values == 0.0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.1, 3.0), st.floats(0.0, 2.0))
def test_maximum_principle(q0, c, bend):
    # q > 0 heats the slab, so temperatures stay nonnegative
    spec = ProblemSpec(Neumann(lambda t: q0 * (1 + t)))
    disc = Discretization.from_steps(0.1)
    curve = BoundaryCurve(c * disc.t + bend * disc.t ** 2)
    F = solve_fixed_boundary(spec, disc, curve).values
    assert F.min() >= -10 * np.finfo(float).eps * max(np.abs(F).max(), 1.0)


def test_boundary_rows_hold():
    spec, _ = builtin_example("i")
    disc = Discretization.from_steps(0.1)
    F = solve_fixed_boundary(spec, disc, exact_curve(disc)).values
    np.testing.assert_array_equal(F[:, 0], 0.0)
    np.testing.assert_array_equal(F[-1], 0.0)
    np.testing.assert_allclose(F[0, 1:], np.exp(disc.t[1:]) - 1)


@pytest.mark.parametrize("example,bound", [("ii", 5e-3), ("i", 1e-2)])
def test_exact_curve_error(example, bound):
    spec, exact = builtin_example(example)
    disc = Discretization.from_steps(0.1)
    curve = exact_curve(disc)
    F = solve_fixed_boundary(spec, disc, curve)
    assert error_Ekn(F, curve, exact, disc.M, disc) <= bound


@pytest.mark.parametrize("example", ["i", "ii"])
def test_second_order_on_exact_curve(example):
    spec, exact = builtin_example(example)
    errs = []
    for h in (0.1, 0.05, 0.025):
        disc = Discretization.from_steps(h)
        curve = exact_curve(disc)
        errs.append(error_Ekn(solve_fixed_boundary(spec, disc, curve), curve, exact, disc.M, disc))
    for a, b in zip(errs, errs[1:]):
        assert 1.9 <= order_p(a, b) <= 2.1


def test_each_step_solves_its_system():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.1)
    curve = BoundaryCurve(0.8 * disc.t)
    F = solve_fixed_boundary(spec, disc, curve).values
    for n in range(1, disc.M + 1):
        sys_ = assemble_step(spec, disc, curve, F, n)
        np.testing.assert_allclose(sys_.matvec(F[:, n]), sys_.rhs, atol=1e-12)
