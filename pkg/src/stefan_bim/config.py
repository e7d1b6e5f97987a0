"""JSON run descriptions.

Schema (all keys optional except a problem source)::

    {"example": "i" | "ii" | "iii" | null,
     "dirichlet_g": "<expr in t>", "neumann_q": "<expr in t>",
     "beta": "<expr in x>", "horizon": 1.0,
     "eps": 0.1, "omega": 6.283..., # example iii only
     "dxi": 0.05, "dt": 0.05, "alpha": 0.5, "tol": 1e-6, "max_iter": 200,
     "initial": {"kind": "linear" | "flux" | "file", "c": 1.0, "path": "boundary.csv"}}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .grid import Discretization, GridError, read_curve_csv
from .iteration import FluxIntegral, InitialGuess, LinearSlope, UserCurve, default_initial
from .problem import (EXAMPLE_III_DEFAULTS, ExactSolution, Expression, ProblemError,
                      ProblemSpec, builtin_example, spec_from_expressions)

KNOWN_KEYS = {"example", "dirichlet_g", "neumann_q", "beta", "horizon", "eps", "omega",
              "dxi", "dt", "alpha", "tol", "max_iter", "initial", "start"}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    example: Optional[str] = None
    dirichlet_g: Optional[str] = None
    neumann_q: Optional[str] = None
    beta: str = "1"
    horizon: float = 1.0
    eps: float = EXAMPLE_III_DEFAULTS["eps"]
    omega: float = EXAMPLE_III_DEFAULTS["omega"]
    dxi: float = 0.05
    dt: Optional[float] = None
    alpha: float = 0.5
    tol: float = 1e-6
    max_iter: int = 200
    initial: dict = field(default_factory=dict)
    start: str = "extrapolate"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - KNOWN_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {k: v for k, v in data.items() if v is not None or k == "example"}
        initial = kwargs.get("initial", {})
        if not isinstance(initial, dict):
            raise ConfigError("'initial' must be an object")
        try:
            return cls(**kwargs)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(data)

    def problem(self) -> tuple[ProblemSpec, Optional[ExactSolution]]:
        try:
            if self.example is not None:
                if self.dirichlet_g is not None or self.neumann_q is not None:
                    raise ConfigError("give either 'example' or boundary expressions, not both")
                spec, exact = builtin_example(self.example, self.eps, self.omega,
                                              float(self.horizon))
                expr = Expression.parse(self.beta, "x")
                if not (expr.is_constant and float(expr(0.0)) == 1.0):
                    beta = float(expr(0.0)) if expr.is_constant else expr
                    # the closed-form solution only holds for beta = 1
                    spec, exact = ProblemSpec(spec.bc, beta, spec.horizon,
                                              beta_label=expr.source), None
                return spec, exact
            return spec_from_expressions(self.dirichlet_g, self.neumann_q, self.beta,
                                         float(self.horizon)), None
        except ProblemError as exc:
            raise ConfigError(str(exc)) from None

    def discretization(self) -> Discretization:
        try:
            return Discretization.from_steps(float(self.dxi),
                                             None if self.dt is None else float(self.dt),
                                             float(self.horizon))
        except (GridError, ZeroDivisionError, TypeError) as exc:
            raise ConfigError(str(exc)) from None

    def initial_guess(self, spec: ProblemSpec, disc: Discretization) -> InitialGuess:
        kind = self.initial.get("kind")
        if kind is None:
            if self.example in ("i", "ii"):
                return LinearSlope(1.0)
            return default_initial(spec)
        if kind == "linear":
            return LinearSlope(float(self.initial.get("c", 1.0)))
        if kind == "flux":
            return FluxIntegral()
        if kind == "file":
            path = self.initial.get("path")
            if not path:
                raise ConfigError("initial kind 'file' needs a 'path'")
            try:
                t, curve = read_curve_csv(path)
            except (OSError, GridError, ValueError) as exc:
                raise ConfigError(f"cannot read initial curve: {exc}") from None
            if len(curve) != disc.M + 1:
                raise ConfigError(f"initial curve has {len(curve)} samples, grid needs {disc.M + 1}")
            return UserCurve(curve)
        raise ConfigError(f"unknown initial kind {kind!r}")
