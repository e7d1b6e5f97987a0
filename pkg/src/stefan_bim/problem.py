"""Problem definitions for the one-phase melting (Stefan) problem.

The liquid occupies ``0 < x < s(t)`` and the solid is held at zero
temperature. Heating at ``x = 0`` is either a prescribed temperature
``U(0, t) = g(t)`` (Dirichlet) or a prescribed inflowing flux
``U_x(0, t) = -q(t)`` with ``q > 0`` (Neumann). The front obeys
``beta(s) ds/dt = -U_x(s(t), t)``.
"""

from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

ScalarFunction = Callable[[np.ndarray], np.ndarray]

_SAMPLES = 101


class ProblemError(ValueError):
    """Raised for an ill-posed or malformed problem description."""


def _as_array_function(f: Union[float, ScalarFunction]) -> ScalarFunction:
    if callable(f):
        def wrapped(v, _f=f):
            v = np.asarray(v, dtype=float)
            return np.broadcast_to(np.asarray(_f(v), dtype=float), v.shape).copy()
        return wrapped
    c = float(f)
    return lambda v: np.full(np.shape(v), c)


@dataclass(frozen=True)
class Dirichlet:
    """Prescribed temperature ``U(0, t) = g(t) >= 0``."""

    g: ScalarFunction
    label: str = "g(t)"

    def __post_init__(self):
        object.__setattr__(self, "g", _as_array_function(self.g))


@dataclass(frozen=True)
class Neumann:
    """Prescribed flux magnitude ``q(t) > 0``, i.e. ``U_x(0, t) = -q(t)``."""

    q: ScalarFunction
    label: str = "q(t)"

    def __post_init__(self):
        object.__setattr__(self, "q", _as_array_function(self.q))


BoundaryConditionMode = Union[Dirichlet, Neumann]


@dataclass(frozen=True)
class ExactSolution:
    temperature: Callable[[np.ndarray, np.ndarray], np.ndarray]
    interface: ScalarFunction


@dataclass(frozen=True)
class ProblemSpec:
    """A Stefan problem instance on ``[0, horizon]``.

    ``beta`` may be a number or a callable of position. A numeric ``beta``
    marks the problem as homogeneous, which enables the divergence-form
    boundary operators.
    """

    bc: BoundaryConditionMode
    beta: Union[float, ScalarFunction] = 1.0
    horizon: float = 1.0
    beta_label: str = "1"
    check: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise ProblemError(f"horizon must be finite and positive, got {self.horizon}")
        if not isinstance(self.bc, (Dirichlet, Neumann)):
            raise ProblemError("bc must be Dirichlet or Neumann")
        if self.check:
            self._check_data()

    def _check_data(self):
        t = np.linspace(0.0, self.horizon, _SAMPLES)
        if isinstance(self.bc, Dirichlet):
            if np.any(self.bc.g(t) < 0):
                raise ProblemError("Dirichlet temperature g(t) must be nonnegative")
        elif np.any(self.bc.q(t[1:]) <= 0):
            raise ProblemError("Neumann flux magnitude q(t) must be positive")
        # front positions stay well inside this range for the supported data
        x = np.linspace(0.0, 10.0 * self.horizon + 10.0, _SAMPLES)
        if np.any(eval_beta(self, x) <= 0):
            raise ProblemError("beta(x) must be positive")

    @property
    def is_dirichlet(self) -> bool:
        return isinstance(self.bc, Dirichlet)

    @property
    def constant_beta(self) -> Optional[float]:
        """The value of ``beta`` when it is a constant, else ``None``."""
        if callable(self.beta):
            return None
        return float(self.beta)

    def boundary_data(self, t) -> np.ndarray:
        """``g(t)`` in Dirichlet mode, ``q(t)`` in Neumann mode."""
        if isinstance(self.bc, Dirichlet):
            return self.bc.g(np.asarray(t, dtype=float))
        return self.bc.q(np.asarray(t, dtype=float))


def eval_beta(spec: ProblemSpec, x) -> np.ndarray:
    """Evaluate ``beta`` at position(s) ``x >= 0``.

    Raises
    ------
    ProblemError
        If any value is not strictly positive.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ProblemError("beta is only defined for x >= 0")
    values = _as_array_function(spec.beta)(x)
    if np.any(~(values > 0)):
        raise ProblemError("beta(x) must be positive; check the supplied beta")
    return values


def _exact_temperature(x, t):
    return np.exp(np.asarray(t) - np.asarray(x)) - 1.0


def _exact_interface(t):
    return np.asarray(t, dtype=float).copy()


EXAMPLE_III_DEFAULTS = {"eps": 0.1, "omega": 2.0 * math.pi}


def builtin_example(example: str, eps: float = EXAMPLE_III_DEFAULTS["eps"],
                    omega: float = EXAMPLE_III_DEFAULTS["omega"],
                    horizon: float = 1.0):
    """Return ``(spec, exact)`` for one of the benchmark heating laws.

    ``"i"``   : ``U(0, t) = e^t - 1``
    ``"ii"``  : ``U_x(0, t) = -e^t``
    ``"iii"`` : ``U(0, t) = 1 - eps sin(omega t)``

    Examples i and ii share the exact solution ``U = e^(t-x) - 1``,
    ``s(t) = t`` (with ``beta = 1``); iii has none and ``exact`` is None.
    """
    exact = ExactSolution(_exact_temperature, _exact_interface)
    if example == "i":
        bc = Dirichlet(lambda t: np.exp(t) - 1.0, label="exp(t) - 1")
        return ProblemSpec(bc, 1.0, horizon), exact
    if example == "ii":
        bc = Neumann(np.exp, label="exp(t)")
        return ProblemSpec(bc, 1.0, horizon), exact
    if example == "iii":
        if not (0.0 <= eps < 1.0):
            raise ProblemError(f"example iii needs 0 <= eps < 1, got {eps}")
        if not omega > 0:
            raise ProblemError(f"example iii needs omega > 0, got {omega}")
        bc = Dirichlet(lambda t: 1.0 - eps * np.sin(omega * t),
                       label=f"1 - {eps!r}*sin({omega!r}*t)")
        return ProblemSpec(bc, 1.0, horizon), None
    raise ProblemError(f"unknown example {example!r}; expected one of i, ii, iii")


# -- expression strings -------------------------------------------------------

_FUNCS = {"exp": np.exp, "sin": np.sin, "cos": np.cos}
_BINOPS = {
    ast.Add: np.add,
    ast.Sub: np.subtract,
    ast.Mult: np.multiply,
    ast.Div: np.divide,
}


@dataclass(frozen=True)
class Expression:
    """A parsed expression in one variable.

    Supported grammar: numeric constants, ``pi``, the variable name,
    ``exp``/``sin``/``cos`` calls, unary minus and ``+ - * /``.
    """

    source: str
    variable: str
    _tree: ast.AST = field(repr=False, compare=False)

    @classmethod
    def parse(cls, source: str, variable: str) -> "Expression":
        try:
            tree = ast.parse(str(source).strip(), mode="eval").body
        except SyntaxError as exc:
            raise ProblemError(f"cannot parse expression {source!r}: {exc.msg}") from None
        cls._validate(tree, variable, source)
        return cls(str(source), variable, tree)

    @staticmethod
    def _validate(node, variable, source):
        for sub in ast.walk(node):
            if isinstance(sub, ast.Call):
                if not (isinstance(sub.func, ast.Name) and sub.func.id in _FUNCS
                        and len(sub.args) == 1 and not sub.keywords):
                    raise ProblemError(f"unsupported call in {source!r}")
            elif isinstance(sub, ast.Name):
                if sub.id not in _FUNCS and sub.id not in (variable, "pi"):
                    raise ProblemError(f"unknown name {sub.id!r} in {source!r}; "
                                       f"only {variable!r} is allowed")
            elif isinstance(sub, ast.Constant):
                if isinstance(sub.value, bool) or not isinstance(sub.value, (int, float)):
                    raise ProblemError(f"unsupported constant in {source!r}")
            elif isinstance(sub, ast.BinOp):
                if type(sub.op) not in _BINOPS:
                    raise ProblemError(f"unsupported operator in {source!r}")
            elif isinstance(sub, ast.UnaryOp):
                if not isinstance(sub.op, (ast.USub, ast.UAdd)):
                    raise ProblemError(f"unsupported operator in {source!r}")
            elif not isinstance(sub, (ast.Load, ast.operator, ast.unaryop)):
                raise ProblemError(f"unsupported syntax in {source!r}")

    @property
    def is_constant(self) -> bool:
        return not any(isinstance(n, ast.Name) and n.id == self.variable
                       for n in ast.walk(self._tree))

    def __call__(self, value):
        value = np.asarray(value, dtype=float)
        out = self._eval(self._tree, value)
        return np.broadcast_to(out, value.shape).astype(float)

    def _eval(self, node, value):
        if isinstance(node, ast.Constant):
            return float(node.value)
        if isinstance(node, ast.Name):
            return value if node.id == self.variable else math.pi
        if isinstance(node, ast.UnaryOp):
            operand = self._eval(node.operand, value)
            return -operand if isinstance(node.op, ast.USub) else operand
        if isinstance(node, ast.BinOp):
            return _BINOPS[type(node.op)](self._eval(node.left, value),
                                          self._eval(node.right, value))
        return _FUNCS[node.func.id](self._eval(node.args[0], value))


def spec_from_expressions(dirichlet_g: Optional[str] = None,
                          neumann_q: Optional[str] = None,
                          beta: str = "1", horizon: float = 1.0) -> ProblemSpec:
    """Build a problem from expression strings (``t`` for g/q, ``x`` for beta)."""
    if (dirichlet_g is None) == (neumann_q is None):
        raise ProblemError("give exactly one of dirichlet_g or neumann_q")
    if dirichlet_g is not None:
        expr = Expression.parse(dirichlet_g, "t")
        bc = Dirichlet(expr, label=expr.source)
    else:
        expr = Expression.parse(neumann_q, "t")
        bc = Neumann(expr, label=expr.source)
    beta_expr = Expression.parse(beta, "x")
    beta_value = float(beta_expr(0.0)) if beta_expr.is_constant else beta_expr
    return ProblemSpec(bc, beta_value, float(horizon), beta_label=beta_expr.source)
