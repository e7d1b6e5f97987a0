"""Crank-Nicolson solution of the heat equation on a prescribed front.

With ``xi = x / s(t)`` and ``F(xi, t) = U(x, t)`` the liquid region maps
onto ``xi in [0, 1]`` and the heat equation becomes

    F_xixi = z F_t - (xi / 2) z' F_xi,      z = s^2.

Each time step gives one tridiagonal system, assembled in banded form and
solved with the Thomas algorithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import BoundaryCurve, Discretization, TemperatureField
from .problem import Dirichlet, ProblemSpec


class SolverError(RuntimeError):
    pass


@dataclass
class StepCoefficients:
    rho: float
    sigma: np.ndarray  # indexed by i = 0..N; only 1..N-1 enter the stencil


@dataclass
class TridiagonalSystem:
    """Banded storage: row ``i`` reads ``sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1]``.

    ``sub[0]`` and ``sup[-1]`` are unused and kept at zero.
    """

    sub: np.ndarray
    diag: np.ndarray
    sup: np.ndarray
    rhs: np.ndarray

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[1:] += self.sub[1:] * x[:-1]
        y[:-1] += self.sup[:-1] * x[1:]
        return y

    def dense(self) -> np.ndarray:
        n = self.diag.size
        A = np.diag(self.diag)
        A[np.arange(1, n), np.arange(n - 1)] = self.sub[1:]
        A[np.arange(n - 1), np.arange(1, n)] = self.sup[:-1]
        return A


def step_coefficients(disc: Discretization, curve: BoundaryCurve, n: int) -> StepCoefficients:
    z = curve.z
    z_mid = 0.5 * (z[n] + z[n - 1])
    dz = (z[n] - z[n - 1]) / disc.dt
    rho = z_mid * 2.0 * disc.dxi ** 2 / disc.dt
    sigma = disc.xi / 4.0 * dz * disc.dxi
    return StepCoefficients(rho, sigma)


def assemble_step(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                  field, n: int) -> TridiagonalSystem:
    """Assemble the system advancing column ``n - 1`` of ``field`` to column ``n``.

    ``field`` may be a :class:`TemperatureField` or a raw ``(N+1, M+1)`` array
    whose columns ``0..n-1`` are filled.
    """
    if not 1 <= n <= disc.M:
        raise SolverError(f"time index must be in 1..{disc.M}, got {n}")
    if len(curve) != disc.M + 1:
        raise SolverError(f"curve has {len(curve)} samples, grid needs {disc.M + 1}")
    s = curve.values
    if s[n] <= 0:
        raise SolverError(f"inadmissible boundary s^{n}={s[n]}")
    F = field.values if isinstance(field, TemperatureField) else field
    prev = F[:, n - 1]
    N = disc.N

    c = step_coefficients(disc, curve, n)
    rho, sig = c.rho, c.sigma

    sub = 1.0 - sig
    diag = np.full(N + 1, -(2.0 + rho))
    sup = 1.0 + sig
    rhs = np.empty(N + 1)
    rhs[1:N] = (-(1.0 - sig[1:N]) * prev[:N - 1] + (2.0 - rho) * prev[1:N]
                - (1.0 + sig[1:N]) * prev[2:])

    if isinstance(spec.bc, Dirichlet):
        diag[0], sup[0] = 1.0, 0.0
        rhs[0] = spec.bc.g(disc.t[n])
    else:
        # ghost node from F_xi(0, t) = -s(t) q(t)
        q = spec.bc.q(disc.t[n - 1:n + 1])
        sup[0] = 2.0
        rhs[0] = ((2.0 - rho) * prev[0] - 2.0 * prev[1]
                  - 2.0 * disc.dxi * (q[1] * s[n] + q[0] * s[n - 1]))

    # melting front: F_N = 0
    sub[N], diag[N], rhs[N] = 0.0, -(2.0 + rho), 0.0
    sub[0] = 0.0
    sup[N] = 0.0
    return TridiagonalSystem(sub, diag, sup, rhs)


def thomas_solve(sys: TridiagonalSystem) -> np.ndarray:
    """Solve a tridiagonal system by forward elimination and back substitution.

    No pivoting is done; a vanishing pivot raises :class:`SolverError`.
    """
    a, b, c, d = (np.asarray(v, dtype=float).tolist()
                  for v in (sys.sub, sys.diag, sys.sup, sys.rhs))
    n = len(b)
    tiny = 1e-14 * max(max(abs(v) for v in b), 1e-300)
    cp = [0.0] * n
    dp = [0.0] * n
    piv = b[0]
    if abs(piv) <= tiny:
        raise SolverError("zero pivot in row 0")
    cp[0] = c[0] / piv
    dp[0] = d[0] / piv
    for i in range(1, n):
        piv = b[i] - a[i] * cp[i - 1]
        if abs(piv) <= tiny:
            raise SolverError(f"zero pivot in row {i}")
        cp[i] = c[i] / piv
        dp[i] = (d[i] - a[i] * dp[i - 1]) / piv
    for i in range(n - 2, -1, -1):
        dp[i] -= cp[i] * dp[i + 1]
    return np.array(dp)


def solve_fixed_boundary(spec: ProblemSpec, disc: Discretization,
                         curve: BoundaryCurve) -> TemperatureField:
    """Temperature on the prescribed front ``curve``, starting from ``F = 0``."""
    if len(curve) != disc.M + 1:
        raise SolverError(f"curve has {len(curve)} samples, grid needs {disc.M + 1}")
    F = np.zeros((disc.N + 1, disc.M + 1))
    for n in range(1, disc.M + 1):
        system = assemble_step(spec, disc, curve, F, n)
        try:
            F[:, n] = thomas_solve(system)
        except SolverError as exc:
            raise SolverError(f"time step {n}: {exc}") from exc
    return TemperatureField(F)
