"""Uniform space-time grids, the boundary/temperature containers and the
small quadrature and differencing kernels shared by the solvers."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class GridError(ValueError):
    pass


@dataclass(frozen=True)
class Discretization:
    """``N`` space intervals on ``xi in [0, 1]`` and ``M`` time steps on ``[0, T]``."""

    N: int
    M: int
    T: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise GridError(f"N must be an integer >= 2, got {self.N}")
        if int(self.M) != self.M or self.M < 1:
            raise GridError(f"M must be an integer >= 1, got {self.M}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise GridError(f"T must be positive, got {self.T}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "M", int(self.M))

    @classmethod
    def from_steps(cls, dxi: float, dt: float | None = None, T: float = 1.0) -> "Discretization":
        """Build from step sizes; ``1/dxi`` and ``T/dt`` must be integers."""
        dt = dxi if dt is None else dt
        N = round(1.0 / dxi)
        M = round(T / dt)
        if abs(N * dxi - 1.0) > 1e-9 or abs(M * dt - T) > 1e-9 * max(1.0, T):
            raise GridError(f"1/dxi and T/dt must be integers (dxi={dxi}, dt={dt}, T={T})")
        return cls(N, M, T)

    @property
    def dxi(self) -> float:
        return 1.0 / self.N

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def xi(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.dxi

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.M + 1) * self.dt

    def time_index(self, time: float) -> int:
        n = round(time / self.dt)
        if not 0 <= n <= self.M or abs(n * self.dt - time) > 1e-9 * max(1.0, self.T):
            raise GridError(f"t={time} is not a node of the time grid")
        return n


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BoundaryCurve:
    """Front positions ``s^n`` on the time grid; ``s^0 = 0`` and ``s^n > 0`` after.

    ``strict=False`` skips the positivity check, for raw operator output
    that has not been made admissible yet.
    """

    values: np.ndarray
    strict: bool = True

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 1 or v.size < 2:
            raise GridError("a boundary curve needs at least two time samples")
        if v[0] != 0.0:
            raise GridError(f"boundary must start at 0, got s^0={v[0]}")
        if not np.all(np.isfinite(v)):
            raise GridError("boundary values must be finite")
        if self.strict and np.any(v[1:] <= 0):
            n = int(np.argmax(v[1:] <= 0)) + 1
            raise GridError(f"boundary must be positive for n >= 1 (s^{n}={v[n]})")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_function(cls, f, disc: Discretization) -> "BoundaryCurve":
        return cls(np.asarray(f(disc.t), dtype=float))

    def __len__(self):
        return self.values.size

    @property
    def admissible(self) -> bool:
        return bool(np.all(self.values[1:] > 0))

    @property
    def z(self) -> np.ndarray:
        """Squared positions, the variable the scheme is written in."""
        return self.values ** 2


@dataclass(frozen=True, eq=False)
class TemperatureField:
    """Transformed temperatures ``F[i, n] = U(xi_i s^n, t^n)``, shape ``(N+1, M+1)``."""

    values: np.ndarray

    def __post_init__(self):
        v = _frozen(self.values)
        if v.ndim != 2:
            raise GridError("temperature field must be two-dimensional")
        object.__setattr__(self, "values", v)

    @property
    def N(self) -> int:
        return self.values.shape[0] - 1

    @property
    def M(self) -> int:
        return self.values.shape[1] - 1


def trapezoid_prefix(samples, step: float) -> np.ndarray:
    """Cumulative trapezoid integrals; ``out[k]`` covers the first ``k`` intervals."""
    y = np.asarray(samples, dtype=float)
    if y.ndim != 1 or y.size < 1:
        raise GridError("need a one-dimensional array of samples")
    if not step > 0:
        raise GridError(f"step must be positive, got {step}")
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * step * (y[1:] + y[:-1]))
    return out


def one_sided_deriv(field, n: int, end: str, dxi: float) -> float:
    """Second-order one-sided ``dF/dxi`` at ``xi = 0`` (``"left"``) or ``xi = 1`` (``"right"``)."""
    F = field.values if isinstance(field, TemperatureField) else np.asarray(field, dtype=float)
    col = F[:, n] if F.ndim == 2 else F
    if col.size < 3:
        raise GridError("one-sided derivative needs N >= 2")
    if end == "left":
        return (-3.0 * col[0] + 4.0 * col[1] - col[2]) / (2.0 * dxi)
    if end == "right":
        return (3.0 * col[-1] - 4.0 * col[-2] + col[-3]) / (2.0 * dxi)
    raise GridError(f"end must be 'left' or 'right', got {end!r}")


def edge_derivatives(field: TemperatureField, dxi: float, end: str) -> np.ndarray:
    """:func:`one_sided_deriv` for every time column at once."""
    F = field.values
    if F.shape[0] < 3:
        raise GridError("one-sided derivative needs N >= 2")
    if end == "left":
        return (-3.0 * F[0] + 4.0 * F[1] - F[2]) / (2.0 * dxi)
    if end == "right":
        return (3.0 * F[-1] - 4.0 * F[-2] + F[-3]) / (2.0 * dxi)
    raise GridError(f"end must be 'left' or 'right', got {end!r}")


def boundary_rates(curve, dt: float) -> np.ndarray:
    """``ds/dt`` at every node: central inside, second-order one-sided at the ends."""
    s = curve.values if isinstance(curve, BoundaryCurve) else np.asarray(curve, dtype=float)
    if s.size < 3:
        raise GridError("boundary rate needs M >= 2")
    return np.gradient(s, dt, edge_order=2)


def boundary_rate(curve, n: int, dt: float) -> float:
    s = curve.values if isinstance(curve, BoundaryCurve) else np.asarray(curve, dtype=float)
    if not 0 <= n < s.size:
        raise GridError(f"time index {n} out of range")
    return float(boundary_rates(s, dt)[n])


# -- CSV ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_curve_csv(path, curve: BoundaryCurve, disc: Discretization) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "s"])
        for t, s in zip(disc.t, curve.values):
            w.writerow([_fmt(t), _fmt(s)])


def read_curve_csv(path) -> tuple[np.ndarray, BoundaryCurve]:
    """Return ``(t, curve)`` from a file written by :func:`write_curve_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != ["t", "s"]:
        raise GridError(f"{path}: expected header 't,s'")
    data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    return data[:, 0], BoundaryCurve(data[:, 1])


def write_field_csv(path, field: TemperatureField, disc: Discretization) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "xi", "F"])
        xi = disc.xi
        for n, t in enumerate(disc.t):
            for i in range(disc.N + 1):
                w.writerow([_fmt(t), _fmt(xi[i]), _fmt(field.values[i, n])])


def read_field_csv(path, disc: Discretization) -> TemperatureField:
    F = np.zeros((disc.N + 1, disc.M + 1))
    with open(Path(path), newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for k, row in enumerate(reader):
            F[k % (disc.N + 1), k // (disc.N + 1)] = float(row[2])
    return TemperatureField(F)
