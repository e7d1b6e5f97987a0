import math

import numpy as np
import pytest

from stefan_bim.problem import (Dirichlet, Expression, Neumann, ProblemError, ProblemSpec,
                                builtin_example, eval_beta, spec_from_expressions)


def test_example_i_is_dirichlet_with_exact_solution():
    spec, exact = builtin_example("i")
    assert spec.is_dirichlet
    t = np.linspace(0, 1, 7)
    np.testing.assert_allclose(spec.boundary_data(t), np.exp(t) - 1)
    np.testing.assert_allclose(exact.interface(t), t)
    # the exact temperature meets the boundary data and vanishes on the front
    np.testing.assert_allclose(exact.temperature(0.0 * t, t), np.exp(t) - 1)
    np.testing.assert_allclose(exact.temperature(t, t), 0.0, atol=1e-15)


def test_example_ii_flux_matches_exact_gradient():
    spec, exact = builtin_example("ii")
    assert not spec.is_dirichlet
    t = np.linspace(0, 1, 7)
    h = 1e-6
    ux = (exact.temperature(h, t) - exact.temperature(-h, t)) / (2 * h)
    np.testing.assert_allclose(-ux, spec.boundary_data(t), rtol=1e-8)


def test_exact_solution_satisfies_stefan_condition():
    _, exact = builtin_example("i")
    t = np.linspace(0.1, 1, 5)
    h = 1e-6
    ux = (exact.temperature(t + h, t) - exact.temperature(t - h, t)) / (2 * h)
    sdot = 1.0
    np.testing.assert_allclose(sdot + ux, 0.0, atol=1e-8)


def test_example_iii_defaults_and_validation():
    spec, exact = builtin_example("iii")
    assert exact is None
    g = spec.boundary_data(np.array([0.0, 0.25]))
    np.testing.assert_allclose(g, [1.0, 0.9])
    with pytest.raises(ProblemError):
        builtin_example("iii", eps=1.0)
    with pytest.raises(ProblemError):
        builtin_example("iii", omega=0.0)
    with pytest.raises(ProblemError):
        builtin_example("iv")


def test_invalid_data_rejected():
    with pytest.raises(ProblemError):
        ProblemSpec(Dirichlet(lambda t: t - 0.5))
    with pytest.raises(ProblemError):
        ProblemSpec(Neumann(0.0))
    with pytest.raises(ProblemError):
        ProblemSpec(Neumann(1.0), beta=-1.0)
    with pytest.raises(ProblemError):
        ProblemSpec(Neumann(1.0), beta=lambda x: 1.0 - x)
    with pytest.raises(ProblemError):
        ProblemSpec(Neumann(1.0), horizon=0.0)


def test_eval_beta_constant_and_callable():
    spec = ProblemSpec(Neumann(1.0), beta=2.0)
    assert spec.constant_beta == 2.0
    np.testing.assert_allclose(eval_beta(spec, [0.0, 0.5]), [2.0, 2.0])
    spec = ProblemSpec(Neumann(1.0), beta=lambda x: 1.0 + x)
    assert spec.constant_beta is None
    np.testing.assert_allclose(eval_beta(spec, [0.0, 0.5]), [1.0, 1.5])
    with pytest.raises(ProblemError):
        eval_beta(spec, -0.1)


@pytest.mark.parametrize("source,value,expected", [
    ("exp(t)", 1.0, math.e),
    ("1 - 0.1*sin(2*pi*t)", 0.25, 0.9),
    ("-t + 3", 1.0, 2.0),
    ("cos(t)/2", 0.0, 0.5),
    ("2", 5.0, 2.0),
])
def test_expression_evaluation(source, value, expected):
    assert float(Expression.parse(source, "t")(value)) == pytest.approx(expected)


@pytest.mark.parametrize("bad", ["__import__('os')", "x", "t**2", "log(t)", "t if t else 1",
                                 "'a'", "exp(t, 2)", "(", "t.real"])
def test_expression_rejects_unsupported(bad):
    with pytest.raises(ProblemError):
        Expression.parse(bad, "t")


def test_expression_constant_flag():
    assert Expression.parse("2*pi", "x").is_constant
    assert not Expression.parse("1 + x", "x").is_constant


def test_spec_from_expressions():
    spec = spec_from_expressions(neumann_q="exp(t)", beta="1 + x")
    assert spec.constant_beta is None
    assert spec.beta_label == "1 + x"
    spec = spec_from_expressions(dirichlet_g="exp(t) - 1", beta="2")
    assert spec.is_dirichlet and spec.constant_beta == 2.0
    with pytest.raises(ProblemError):
        spec_from_expressions()
    with pytest.raises(ProblemError):
        spec_from_expressions(dirichlet_g="t", neumann_q="1")
