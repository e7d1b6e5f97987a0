"""Boundary-updating operators.

``R`` maps a trial front ``s`` to the time integral of the Stefan condition
evaluated on the fixed-boundary solution ``U^s``; its fixed points solve the
free-boundary problem. For constant ``beta`` the divergence theorem turns
the front-flux integral into a heat-balance form:

    Neumann:    R(s)(t) = (1/beta) [ int_0^t q dz             - int_0^s(t) U^s dx ]
    Dirichlet:  R(s)(t) = (1/beta) [ -int_0^t U^s_x(0, z) dz  - int_0^s(t) U^s dx ]

``P^alpha(s) = alpha R(s) + (1 - alpha) s`` damps the oscillation caused by
the order-reversing behaviour of ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fixed_boundary import solve_fixed_boundary
from .grid import (BoundaryCurve, Discretization, TemperatureField,
                   edge_derivatives, trapezoid_prefix)
from .problem import Dirichlet, Neumann, ProblemSpec, eval_beta

DEGENERATE = 1e-14


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class OperatorConfig:
    """Relaxation weight for ``P``; ``gamma_estimate`` fixes ``alpha = 1/(1+gamma)``."""

    alpha: float = 0.5
    gamma_estimate: Optional[float] = None
    # how flux integrands are started at t = 0, see START_RULES
    start: str = "extrapolate"

    def __post_init__(self):
        if self.start not in START_RULES:
            raise OperatorError(f"start must be one of {START_RULES}, got {self.start!r}")
        if self.gamma_estimate is not None:
            if not self.gamma_estimate > 0:
                raise OperatorError("gamma_estimate must be positive")
            object.__setattr__(self, "alpha", 1.0 / (1.0 + self.gamma_estimate))
        if not 0.0 <= self.alpha <= 1.0:
            raise OperatorError(f"alpha must lie in [0, 1], got {self.alpha}")


# The t = 0 column is degenerate (s^0 = 0), so flux integrands there are
# either extrapolated linearly from n = 1, 2 or set to zero.
START_RULES = ("extrapolate", "zero")


def _start_value(y: np.ndarray, start: str = "extrapolate") -> float:
    if start == "zero":
        return 0.0
    if y.size > 2:
        return 2.0 * y[1] - y[2]
    return y[1]


def _check_admissible(curve: BoundaryCurve):
    s = curve.values
    if np.any(s[1:] < DEGENERATE):
        n = int(np.argmax(s[1:] < DEGENERATE)) + 1
        raise OperatorError(f"degenerate boundary: s^{n}={s[n]:.3e}")


def _constant_beta(spec: ProblemSpec, name: str) -> float:
    beta = spec.constant_beta
    if beta is None:
        raise OperatorError(f"{name} needs constant beta; use apply_R_direct instead")
    return beta


def stored_heat(field: TemperatureField, curve: BoundaryCurve, disc: Discretization) -> np.ndarray:
    """``int_0^s(t) U dx`` at every time node (trapezoid in ``xi``, times ``s``)."""
    F = field.values
    per_xi = disc.dxi * (F.sum(axis=0) - 0.5 * (F[0] + F[-1]))
    return curve.values * per_xi


def left_flux(field: TemperatureField, curve: BoundaryCurve, disc: Discretization,
              start: str = "extrapolate") -> np.ndarray:
    """``U_x(0, t^n) = F_xi(0, t^n) / s^n``; the ``n = 0`` entry follows ``start``."""
    s = curve.values
    out = np.zeros(s.size)
    out[1:] = edge_derivatives(field, disc.dxi, "left")[1:] / s[1:]
    out[0] = _start_value(out, start)
    return out


def front_flux(field: TemperatureField, curve: BoundaryCurve, disc: Discretization,
              start: str = "extrapolate") -> np.ndarray:
    """``U_x(s(t^n), t^n) = F_xi(1, t^n) / s^n``; ``n = 0`` follows ``start``."""
    s = curve.values
    out = np.zeros(s.size)
    out[1:] = edge_derivatives(field, disc.dxi, "right")[1:] / s[1:]
    out[0] = _start_value(out, start)
    return out


def apply_R_neumann(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                    field: Optional[TemperatureField] = None) -> BoundaryCurve:
    """Heat-balance form of ``R`` for flux heating.

    ``field`` may be passed to reuse an existing fixed-boundary solve on
    ``curve``. The result is not clamped and may be non-positive.
    """
    if not isinstance(spec.bc, Neumann):
        raise OperatorError("apply_R_neumann needs a Neumann problem")
    beta = _constant_beta(spec, "apply_R_neumann")
    _check_admissible(curve)
    if field is None:
        field = solve_fixed_boundary(spec, disc, curve)
    supplied = trapezoid_prefix(spec.bc.q(disc.t), disc.dt)
    out = (supplied - stored_heat(field, curve, disc)) / beta
    out[0] = 0.0
    return _raw_curve(out)


def apply_R_dirichlet(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                      field: Optional[TemperatureField] = None,
                      start: str = "extrapolate") -> BoundaryCurve:
    """Heat-balance form of ``R`` for temperature heating.

    The inflow ``-U_x(0, t)`` comes from a second-order one-sided difference
    divided by ``s``. At ``t = 0`` it is extrapolated by default;
    ``start="zero"`` drops it, which costs first-order accuracy of the front
    near ``t = 0``.
    """
    if not isinstance(spec.bc, Dirichlet):
        raise OperatorError("apply_R_dirichlet needs a Dirichlet problem")
    beta = _constant_beta(spec, "apply_R_dirichlet")
    _check_admissible(curve)
    if field is None:
        field = solve_fixed_boundary(spec, disc, curve)
    inflow = trapezoid_prefix(-left_flux(field, curve, disc, start), disc.dt)
    out = (inflow - stored_heat(field, curve, disc)) / beta
    out[0] = 0.0
    return _raw_curve(out)


def apply_R_direct(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                   field: Optional[TemperatureField] = None,
                   start: str = "extrapolate") -> BoundaryCurve:
    """``R(s)(t) = int_0^t -U_x(s(z), z) / beta(s(z)) dz`` for any positive ``beta``.

    Works in both heating modes. Uses the front derivative directly, so it is
    less accurate than the heat-balance forms when those apply.
    """
    _check_admissible(curve)
    if field is None:
        field = solve_fixed_boundary(spec, disc, curve)
    rate = -front_flux(field, curve, disc, start) / eval_beta(spec, curve.values)
    out = trapezoid_prefix(rate, disc.dt)
    return _raw_curve(out)


def apply_R(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
            field: Optional[TemperatureField] = None,
            start: str = "extrapolate") -> BoundaryCurve:
    """Pick the heat-balance form for constant ``beta``, the direct form otherwise."""
    if spec.constant_beta is None:
        return apply_R_direct(spec, disc, curve, field, start)
    if isinstance(spec.bc, Neumann):
        return apply_R_neumann(spec, disc, curve, field)
    return apply_R_dirichlet(spec, disc, curve, field, start)


def apply_P(config: OperatorConfig, r_of_s: BoundaryCurve, s: BoundaryCurve) -> BoundaryCurve:
    r = r_of_s.values
    v = s.values
    if r.shape != v.shape:
        raise OperatorError(f"length mismatch: {r.size} vs {v.size}")
    a = config.alpha
    return _raw_curve(a * r + (1.0 - a) * v)


def _raw_curve(values) -> BoundaryCurve:
    return BoundaryCurve(values, strict=False)
