"""Stefan-condition discrepancy and the linearized boundary correction.

For a trial front ``s`` with fixed-boundary solution ``U``, the discrepancy

    D1(s) = int_0^T (U_x(s, t) + ds/dt)^2 dt
    D2(s) = int_0^T [(U_x(s, t) + ds/dt)^2 + U(s, t)^2] dt

measures how badly the front violates the Stefan condition (``D1 = D2`` on
the front itself, where ``U`` vanishes). Linearizing ``U_x`` and ``U``
around ``s`` and minimising over a correction ``eta`` with ``eta(0) = 0``
gives the two-point problem

    eta'' + b eta + a = 0,   a = ds/dt + U_x(s, t),   b = U_xx(s, t),

with the natural condition ``eta' + b eta + a = 0`` at ``t = T``. The update
is ``s + eps * eta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .fixed_boundary import SolverError, TridiagonalSystem, solve_fixed_boundary, thomas_solve
from .grid import BoundaryCurve, Discretization, TemperatureField, boundary_rates, trapezoid_prefix
from .iteration import make_admissible, stefan_residual
from .operators import DEGENERATE, front_flux
from .problem import ProblemSpec


class RefinementError(ValueError):
    pass


@dataclass
class DiscrepancyReport:
    d1: float
    d2: float
    residual_curve: np.ndarray
    t: Optional[np.ndarray] = None

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residual_curve)))


@dataclass
class PerturbationCoefficients:
    a: np.ndarray  # drift: ds/dt + U_x on the front
    b: np.ndarray  # U_xx on the front


@dataclass
class RefinementResult:
    curve: BoundaryCurve
    eta: np.ndarray
    before: DiscrepancyReport
    projected_d2: float
    clamped: int = 0

    @property
    def projected_ratio(self) -> float:
        if self.before.d2 == 0:
            return 1.0
        return self.projected_d2 / self.before.d2


def _integral(values: np.ndarray, dt: float) -> float:
    return float(trapezoid_prefix(values, dt)[-1])


def _check_curve(curve: BoundaryCurve):
    if np.any(curve.values[1:] < DEGENERATE):
        raise RefinementError("degenerate boundary: front must be positive for t > 0")


def discrepancy(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                field: Optional[TemperatureField] = None) -> DiscrepancyReport:
    """``D1``, ``D2`` and the per-node Stefan residual of ``curve``.

    The residual is ``beta(s) ds/dt + U_x(s, t)``; its ``t = 0`` entry is 0.
    """
    _check_curve(curve)
    if field is None:
        field = solve_fixed_boundary(spec, disc, curve)
    r = stefan_residual(spec, disc, curve, field)
    front_temperature = field.values[-1]
    d1 = _integral(r ** 2, disc.dt)
    d2 = _integral(r ** 2 + front_temperature ** 2, disc.dt)
    return DiscrepancyReport(d1, d2, r, disc.t)


def _unit_beta(spec: ProblemSpec) -> float:
    beta = spec.constant_beta
    if beta is None:
        raise RefinementError("the linearized refinement needs constant beta")
    return beta


def perturbation_coefficients(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                              field: Optional[TemperatureField] = None) -> PerturbationCoefficients:
    """Coefficients of the correction equation from front data only.

    ``U_xx`` on the front follows from differentiating ``U(s(t), t) = 0`` and
    using ``U_t = U_xx``: ``U_xx(s, t) = -U_x(s, t) ds/dt``. For a constant
    ``beta`` other than 1 the Stefan condition is divided through by ``beta``.
    """
    beta = _unit_beta(spec)
    _check_curve(curve)
    if field is None:
        field = solve_fixed_boundary(spec, disc, curve)
    ux = front_flux(field, curve, disc)
    sdot = boundary_rates(curve, disc.dt)
    return PerturbationCoefficients(sdot + ux / beta, -ux * sdot / beta)


def solve_perturbation(coeffs: PerturbationCoefficients, disc: Discretization) -> np.ndarray:
    """Solve ``eta'' + b eta + a = 0`` with ``eta(0) = 0`` and the natural end condition.

    Central differences inside. At ``t = T`` the second-order one-sided
    derivative is used, with ``eta_{M-2}`` eliminated through the interior
    equation at ``M - 1`` so the system stays tridiagonal.
    """
    a = np.asarray(coeffs.a, dtype=float)
    b = np.asarray(coeffs.b, dtype=float)
    M, h = disc.M, disc.dt
    if a.shape != (M + 1,) or b.shape != (M + 1,):
        raise RefinementError(f"coefficients must have length {M + 1}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise RefinementError("coefficients must be finite")
    if M < 2:
        raise RefinementError("need at least two time steps")

    sub = np.ones(M + 1)
    diag = b * h * h - 2.0
    sup = np.ones(M + 1)
    rhs = -a * h * h
    sub[0], diag[0], sup[0], rhs[0] = 0.0, 1.0, 0.0, 0.0
    sub[M] = -2.0 - b[M - 1] * h * h
    diag[M] = 2.0 + 2.0 * h * b[M]
    sup[M] = 0.0
    rhs[M] = a[M - 1] * h * h - 2.0 * h * a[M]
    try:
        return thomas_solve(TridiagonalSystem(sub, diag, sup, rhs))
    except SolverError as exc:
        raise RefinementError(f"correction problem is singular (resonant b?); "
                              f"refine the time grid: {exc}") from exc


def minimize_linearized(coeffs: PerturbationCoefficients, disc: Discretization) -> np.ndarray:
    """Exact minimiser of ``int (a + eta' + b eta)^2 dt`` with ``eta(0) = 0``.

    With ``w = a + eta' + b eta`` the Euler-Lagrange equation is ``w' = b w``
    and the natural end condition is ``w(T) = 0``, so ``w`` vanishes
    identically: ``eta' = -a - b eta``. Integrated with the trapezoid rule.
    """
    a = np.asarray(coeffs.a, dtype=float)
    b = np.asarray(coeffs.b, dtype=float)
    h = disc.dt
    if a.shape != (disc.M + 1,) or b.shape != (disc.M + 1,):
        raise RefinementError(f"coefficients must have length {disc.M + 1}")
    eta = np.zeros(disc.M + 1)
    for n in range(1, disc.M + 1):
        denom = 1.0 + 0.5 * h * b[n]
        if abs(denom) < 1e-14:
            raise RefinementError(f"step {n}: time step too large for b={b[n]:.3e}")
        eta[n] = ((1.0 - 0.5 * h * b[n - 1]) * eta[n - 1] - 0.5 * h * (a[n] + a[n - 1])) / denom
    return eta


def projected_d2(coeffs: PerturbationCoefficients, eta: np.ndarray, front_ux: np.ndarray,
                 eps: float, disc: Discretization) -> float:
    """``D2`` of ``s + eps*eta`` from the first-order expansion of ``U`` about ``s``."""
    eta_dot = boundary_rates(eta, disc.dt)
    drift = coeffs.a + eps * (eta_dot + coeffs.b * eta)
    heat = front_ux * eps * eta
    integrand = drift ** 2 + heat ** 2
    integrand[0] = 0.0
    return _integral(integrand, disc.dt)


def refine_boundary(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                    epsilon: float, method: str = "minimizer") -> RefinementResult:
    """One linearized correction step ``s -> s + epsilon * eta``.

    ``method="minimizer"`` takes ``eta`` from :func:`minimize_linearized`;
    ``"two_point"`` uses :func:`solve_perturbation` instead. ``projected_d2``
    is the first-order prediction of ``D2`` on the new front (no re-solve);
    compare it with ``before.d2``.
    """
    if method not in ("minimizer", "two_point"):
        raise RefinementError(f"unknown method {method!r}")
    if not 0.0 <= epsilon <= 1.0:
        raise RefinementError(f"epsilon must lie in [0, 1], got {epsilon}")
    beta = _unit_beta(spec)
    _check_curve(curve)
    field = solve_fixed_boundary(spec, disc, curve)
    before = discrepancy(spec, disc, curve, field)
    coeffs = perturbation_coefficients(spec, disc, curve, field)
    if method == "minimizer":
        eta = minimize_linearized(coeffs, disc)
    else:
        eta = solve_perturbation(coeffs, disc)
    eta[0] = 0.0
    ux = front_flux(field, curve, disc) / beta
    projected = projected_d2(coeffs, eta, ux, epsilon, disc)
    # ``a`` is the residual divided by beta; rescale to the units of D2
    projected *= beta ** 2
    raw = BoundaryCurve(curve.values + epsilon * eta, strict=False)
    if np.all(raw.values[1:] <= 0):
        raise RefinementError("refined boundary is inadmissible at every node")
    new, clamped = make_admissible(raw)
    return RefinementResult(new, eta, before, projected, clamped)
