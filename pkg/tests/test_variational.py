import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stefan_bim.grid import BoundaryCurve, Discretization
from stefan_bim.problem import Dirichlet, Neumann, ProblemSpec, builtin_example
from stefan_bim.variational import (PerturbationCoefficients, RefinementError, discrepancy,
                                    minimize_linearized, perturbation_coefficients,
                                    refine_boundary, solve_perturbation)

from conftest import exact_curve


def coeffs(disc, a, b):
    t = disc.t
    return PerturbationCoefficients(np.broadcast_to(a(t), t.shape).astype(float),
                                    np.broadcast_to(b(t), t.shape).astype(float))


def test_two_point_exact_for_quadratic():
    # eta'' = -1, eta(0) = 0, eta'(1) + 1 = 0  ->  eta = -t^2 / 2
    disc = Discretization(2, 10)
    eta = solve_perturbation(coeffs(disc, lambda t: 1.0 + 0 * t, lambda t: 0 * t), disc)
    np.testing.assert_allclose(eta, -disc.t ** 2 / 2, atol=1e-13)


def test_two_point_second_order():
    # eta'' = -e^t, eta'(1) = -e  ->  eta = 1 - e^t
    errs = []
    for M in (20, 40):
        disc = Discretization(2, M)
        eta = solve_perturbation(coeffs(disc, np.exp, lambda t: 0 * t), disc)
        errs.append(np.max(np.abs(eta - (1 - np.exp(disc.t)))))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


def test_minimizer_oracles():
    disc = Discretization(2, 10)
    eta = minimize_linearized(coeffs(disc, lambda t: 1.0 + 0 * t, lambda t: 0 * t), disc)
    np.testing.assert_allclose(eta, -disc.t, atol=1e-14)
    # eta' = -1 + eta  ->  eta = 1 - e^t
    errs = []
    for M in (20, 40):
        disc = Discretization(2, M)
        eta = minimize_linearized(coeffs(disc, lambda t: 1.0 + 0 * t, lambda t: -1.0 + 0 * t),
                                  disc)
        errs.append(np.max(np.abs(eta - (1 - np.exp(disc.t)))))
    assert 3.5 <= errs[0] / errs[1] <= 4.5


@settings(max_examples=30)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-2, 2))
def test_corrections_linear_in_a(c1, c2, bconst):
    disc = Discretization(2, 16)
    b = lambda t: bconst + 0 * t
    a1, a2 = (lambda t: np.sin(3 * t)), (lambda t: 1 + t)
    both = coeffs(disc, lambda t: c1 * a1(t) + c2 * a2(t), b)
    for solver in (minimize_linearized, solve_perturbation):
        lhs = solver(both, disc)
        rhs = c1 * solver(coeffs(disc, a1, b), disc) + c2 * solver(coeffs(disc, a2, b), disc)
        np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_solver_input_checks():
    disc = Discretization(2, 10)
    bad = PerturbationCoefficients(np.zeros(5), np.zeros(5))
    with pytest.raises(RefinementError):
        solve_perturbation(bad, disc)
    with pytest.raises(RefinementError):
        minimize_linearized(bad, disc)
    nan = PerturbationCoefficients(np.full(11, np.nan), np.zeros(11))
    with pytest.raises(RefinementError):
        solve_perturbation(nan, disc)


def test_discrepancy_exact_vs_wrong():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.025)
    good = discrepancy(spec, disc, exact_curve(disc))
    bad = discrepancy(spec, disc, BoundaryCurve(2 * disc.t))
    assert good.d1 <= 1e-3
    assert bad.d1 >= 10 * good.d1
    assert good.d2 == pytest.approx(good.d1)


def test_coefficients_on_exact_curve():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.025)
    c = perturbation_coefficients(spec, disc, exact_curve(disc))
    assert np.max(np.abs(c.a[1:])) <= 2e-2
    assert np.max(np.abs(c.b[1:] - 1.0)) <= 5e-2


@pytest.mark.parametrize("eps", [0.025, 0.05, 0.1])
def test_projected_reduction(eps):
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.05)
    curve = BoundaryCurve(1.2 * disc.t)
    res = refine_boundary(spec, disc, curve, eps)
    assert abs(res.projected_ratio - (1 - 2 * eps)) <= 5 * eps ** 2
    assert discrepancy(spec, disc, res.curve).d1 < res.before.d1


def test_projected_band_example():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.05)
    res = refine_boundary(spec, disc, BoundaryCurve(1.2 * disc.t), 0.05)
    assert 0.88 <= res.projected_ratio <= 0.93


def test_near_noop_on_exact_curve():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.025)
    curve = exact_curve(disc)
    res = refine_boundary(spec, disc, curve, 0.1)
    assert np.max(np.abs(res.curve.values - curve.values)) < 5e-3


def test_two_point_method_runs():
    spec, _ = builtin_example("ii")
    disc = Discretization.from_steps(0.05)
    res = refine_boundary(spec, disc, BoundaryCurve(1.2 * disc.t), 0.05, method="two_point")
    assert res.projected_d2 < res.before.d2


def test_refine_guards():
    disc = Discretization.from_steps(0.1)
    curve = exact_curve(disc)
    with pytest.raises(RefinementError):
        refine_boundary(builtin_example("ii")[0], disc, curve, 2.0)
    with pytest.raises(RefinementError):
        refine_boundary(builtin_example("ii")[0], disc, curve, 0.1, method="newton")
    with pytest.raises(RefinementError):
        refine_boundary(ProblemSpec(Neumann(1.0), beta=lambda x: 1 + x), disc, curve, 0.1)
