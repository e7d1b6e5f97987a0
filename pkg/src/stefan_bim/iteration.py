"""Outer fixed-point loop: solve on the current front, apply ``R``, relax with
``P^alpha``, repeat until successive fronts agree to ``tol`` in the sup norm."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union

import numpy as np

from .fixed_boundary import SolverError, solve_fixed_boundary
from .grid import (BoundaryCurve, Discretization, TemperatureField, boundary_rates,
                   trapezoid_prefix)
from .operators import OperatorConfig, apply_P, apply_R, front_flux
from .problem import Neumann, ProblemSpec, eval_beta

log = logging.getLogger(__name__)

FLOOR = 1e-12


class IterationError(RuntimeError):
    pass


@dataclass(frozen=True)
class LinearSlope:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise IterationError(f"linear initial guess needs c > 0, got {self.c}")


@dataclass(frozen=True)
class FluxIntegral:
    """Front that absorbs all supplied heat as latent heat: ``s = int q / beta(0)``."""


@dataclass(frozen=True)
class UserCurve:
    curve: BoundaryCurve


InitialGuess = Union[LinearSlope, FluxIntegral, UserCurve]


@dataclass(frozen=True)
class IterationConfig:
    tol: float = 1e-6
    max_iter: int = 200
    operator: OperatorConfig = field(default_factory=OperatorConfig)
    initial: InitialGuess = field(default_factory=LinearSlope)
    # optional alternative stop on the max-node Stefan residual
    residual_tol: Optional[float] = None

    def __post_init__(self):
        if not self.tol > 0:
            raise IterationError(f"tol must be positive, got {self.tol}")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise IterationError(f"max_iter must be a positive integer, got {self.max_iter}")


@dataclass
class IterationReport:
    """History of one fixed-point run.

    ``iterates[0]`` is the initial guess and ``iterates[k]`` the front after
    ``k`` updates, so ``len(iterates) == len(deltas) + 1``. ``sign_pattern[k]``
    is the sign of ``iterates[k+1] - reference`` at its largest deviation.
    """

    iterates: List[BoundaryCurve]
    deltas: np.ndarray
    converged: bool
    clamp_events: int
    clamped: List[int]
    sign_pattern: Optional[List[int]]
    field: Optional[TemperatureField] = None
    max_residual: Optional[float] = None

    @property
    def curve(self) -> BoundaryCurve:
        return self.iterates[-1]

    @property
    def iterations(self) -> int:
        return len(self.deltas)


def initial_curve(spec: ProblemSpec, disc: Discretization, guess: InitialGuess) -> BoundaryCurve:
    if isinstance(guess, LinearSlope):
        return BoundaryCurve(guess.c * disc.t)
    if isinstance(guess, FluxIntegral):
        if not isinstance(spec.bc, Neumann):
            raise IterationError("the flux-integral guess needs a Neumann problem")
        beta0 = float(eval_beta(spec, 0.0))
        return BoundaryCurve(trapezoid_prefix(spec.bc.q(disc.t) / beta0, disc.dt))
    if isinstance(guess, UserCurve):
        curve = guess.curve
        if len(curve) != disc.M + 1:
            raise IterationError(f"user curve has {len(curve)} samples, grid needs {disc.M + 1}")
        if not isinstance(curve, BoundaryCurve) or not curve.admissible:
            raise IterationError("user curve is not admissible")
        return BoundaryCurve(curve.values)
    raise IterationError(f"unknown initial guess {guess!r}")


def default_initial(spec: ProblemSpec) -> InitialGuess:
    return FluxIntegral() if isinstance(spec.bc, Neumann) else LinearSlope(1.0)


def make_admissible(curve: BoundaryCurve) -> tuple[BoundaryCurve, int]:
    """Floor ``s^n`` (``n >= 1``) at a tiny positive value; return the count floored."""
    v = np.array(curve.values)
    low = v[1:] < FLOOR
    v[1:][low] = FLOOR
    return BoundaryCurve(v), int(low.sum())


def stefan_residual(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                    field: TemperatureField) -> np.ndarray:
    """``beta(s) ds/dt + U_x(s, t)`` per node, with the ``n = 0`` entry set to 0."""
    r = eval_beta(spec, curve.values) * boundary_rates(curve, disc.dt) \
        + front_flux(field, curve, disc)
    r[0] = 0.0
    return r


def _sign_at_max(curve: BoundaryCurve, reference: BoundaryCurve) -> int:
    dev = curve.values - reference.values
    return int(np.sign(dev[int(np.argmax(np.abs(dev)))]))


def run_iteration(spec: ProblemSpec, disc: Discretization, cfg: IterationConfig,
                  reference: Optional[BoundaryCurve] = None) -> IterationReport:
    s = initial_curve(spec, disc, cfg.initial)
    iterates = [s]
    deltas: list[float] = []
    clamped: list[int] = []
    signs: list[int] = [] if reference is not None else None
    converged = False
    field = None
    for k in range(cfg.max_iter):
        try:
            field = solve_fixed_boundary(spec, disc, s)
        except SolverError as exc:
            raise IterationError(f"iteration {k}: {exc}") from exc
        if cfg.residual_tol is not None and k > 0:
            if np.max(np.abs(stefan_residual(spec, disc, s, field))) < cfg.residual_tol:
                converged = True
                break
        r = apply_R(spec, disc, s, field, cfg.operator.start)
        new, floored = make_admissible(apply_P(cfg.operator, r, s))
        delta = float(np.max(np.abs(new.values - s.values)))
        deltas.append(delta)
        clamped.append(floored)
        iterates.append(new)
        if signs is not None:
            signs.append(_sign_at_max(new, reference))
        log.debug("iteration %d: delta=%.3e clamped=%d", k, delta, floored)
        s = new
        field = None
        if delta < cfg.tol:
            converged = True
            break
    if field is None:
        field = solve_fixed_boundary(spec, disc, s)
    res = stefan_residual(spec, disc, s, field)
    return IterationReport(iterates, np.array(deltas), converged, sum(clamped), clamped,
                           signs, field, float(np.max(np.abs(res))))
