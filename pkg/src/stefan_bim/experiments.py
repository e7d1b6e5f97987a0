"""Refinement studies, error metrics and the CSV reports behind the CLI."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence

import numpy as np

from .grid import BoundaryCurve, Discretization, TemperatureField, _fmt
from .iteration import IterationConfig, IterationReport, run_iteration
from .problem import ExactSolution, ProblemSpec
from .variational import DiscrepancyReport, RefinementResult, discrepancy

BASE_DXI = 0.1


class StudyError(ValueError):
    pass


def error_Ekn(field: TemperatureField, curve: BoundaryCurve, exact: Optional[ExactSolution],
              n: int, disc: Discretization) -> float:
    """Discrete L2 error of column ``n`` against the exact temperature.

    ``sqrt(dxi * sum_i (F[i, n] - U(s^n xi_i, t^n))^2)``, summed over all
    ``N + 1`` nodes and compared in transformed coordinates.
    """
    if exact is None:
        raise StudyError("no exact solution to compare against")
    if not 0 <= n <= disc.M:
        raise StudyError(f"time index {n} out of range 0..{disc.M}")
    x = curve.values[n] * disc.xi
    diff = field.values[:, n] - exact.temperature(x, disc.t[n])
    return math.sqrt(disc.dxi * float(np.sum(diff ** 2)))


def order_p(e_coarse: float, e_fine: float) -> float:
    """Observed order for a factor-2 refinement: ``log2(e_coarse / e_fine)``."""
    if not (e_coarse > 0 and e_fine > 0):
        raise StudyError(f"errors must be positive, got {e_coarse}, {e_fine}")
    return math.log2(e_coarse / e_fine)


@dataclass(frozen=True)
class StudyConfig:
    """Levels ``k`` use ``dxi = 2**-k * base_dxi`` and ``dt = dxi``."""

    levels: Sequence[int] = (0, 1, 2)
    snapshot_time: float = 1.0
    base_dxi: float = BASE_DXI

    def __post_init__(self):
        levels = tuple(int(k) for k in self.levels)
        if not levels:
            raise StudyError("at least one level is needed")
        if any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] < 0:
            raise StudyError(f"levels must be nonnegative and strictly increasing: {levels}")
        object.__setattr__(self, "levels", levels)

    def discretization(self, k: int, horizon: float) -> Discretization:
        h = self.base_dxi * 2.0 ** -k
        return Discretization.from_steps(h, h, horizon)


@dataclass
class StudyRow:
    level: int
    dxi: float
    error: float
    order: Optional[float]
    iterations: int
    converged: bool
    boundary_error: Optional[float] = None


def refinement_study(spec: ProblemSpec, exact: Optional[ExactSolution], study: StudyConfig,
                     iter_cfg: IterationConfig) -> List[StudyRow]:
    """Run the full fixed-point solve per level and tabulate ``E`` and ``p``.

    A level that does not converge is still reported, with ``converged=False``.
    """
    if exact is None:
        raise StudyError("a refinement study needs an exact solution")
    if not 0 < study.snapshot_time <= spec.horizon:
        raise StudyError(f"snapshot_time must lie in (0, {spec.horizon}]")
    rows: List[StudyRow] = []
    for k in study.levels:
        disc = study.discretization(k, spec.horizon)
        n = disc.time_index(study.snapshot_time)
        rep = run_iteration(spec, disc, iter_cfg)
        err = error_Ekn(rep.field, rep.curve, exact, n, disc)
        s_exact = exact.interface(disc.t)
        rows.append(StudyRow(k, disc.dxi, err, None, rep.iterations, rep.converged,
                             float(np.max(np.abs(rep.curve.values - s_exact)))))
    for prev, row in zip(rows, rows[1:]):
        if row.level == prev.level + 1 and prev.error > 0 and row.error > 0:
            row.order = order_p(prev.error, row.error)
    return rows


def stefan_residual_report(spec: ProblemSpec, disc: Discretization, curve: BoundaryCurve,
                           field: Optional[TemperatureField] = None) -> DiscrepancyReport:
    """Per-node Stefan residual plus ``D1``/``D2`` for a (converged) front."""
    return discrepancy(spec, disc, curve, field)


@dataclass
class OperatorRun:
    alpha: float
    report: IterationReport
    max_deviation: Optional[np.ndarray] = None


def operator_comparison(spec: ProblemSpec, disc: Discretization, alphas: Sequence[float],
                        iter_cfg: IterationConfig,
                        reference: Optional[BoundaryCurve] = None) -> List[OperatorRun]:
    """Run the same problem once per relaxation weight."""
    runs = []
    for a in alphas:
        cfg = replace(iter_cfg, operator=replace(iter_cfg.operator, alpha=float(a),
                                                 gamma_estimate=None))
        rep = run_iteration(spec, disc, cfg, reference)
        dev = None
        if reference is not None:
            dev = np.array([np.max(np.abs(c.values - reference.values)) for c in rep.iterates[1:]])
        runs.append(OperatorRun(float(a), rep, dev))
    return runs


def alternating_run(signs: Sequence[int]) -> int:
    """Length of the longest stretch of strictly alternating nonzero signs."""
    best = run = 0
    prev = 0
    for s in signs:
        if s != 0 and prev != 0 and s == -prev:
            run += 1
        else:
            run = 1 if s != 0 else 0
        best = max(best, run)
        prev = s
    return best


def tail_contracts(deltas: Sequence[float], count: int = 5, factor: float = 0.95) -> bool:
    """True when each of the last ``count`` deltas shrinks by at least ``factor``."""
    d = np.asarray(deltas, dtype=float)
    if d.size < count + 1:
        return False
    tail = d[-(count + 1):]
    return bool(np.all(tail[1:] <= factor * tail[:-1]))


# -- CSV writers --------------------------------------------------------------

def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def write_iterations_csv(path, report: IterationReport) -> None:
    signs = report.sign_pattern
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["k", "delta", "clamped", "sign_at_max_dev"])
        for k, delta in enumerate(report.deltas, start=1):
            sign = "" if signs is None else signs[k - 1]
            w.writerow([k, _fmt(delta), report.clamped[k - 1], sign])


def write_iterates_csv(path, report: IterationReport, disc: Discretization) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["k", "t", "s"])
        for k, curve in enumerate(report.iterates):
            for t, s in zip(disc.t, curve.values):
                w.writerow([k, _fmt(t), _fmt(s)])


def write_study_csv(path, rows: Sequence[StudyRow]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["level", "dxi", "error", "order", "iterations", "converged",
                    "boundary_error"])
        for r in rows:
            w.writerow([r.level, _fmt(r.dxi), _fmt(r.error),
                        "" if r.order is None else _fmt(r.order), r.iterations,
                        int(r.converged),
                        "" if r.boundary_error is None else _fmt(r.boundary_error)])


def read_study_csv(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_operators_csv(path, runs: Sequence[OperatorRun]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = _writer(fh)
        w.writerow(["alpha", "k", "delta", "sign_at_max_dev", "max_dev_from_reference"])
        for run in runs:
            signs = run.report.sign_pattern
            for k, delta in enumerate(run.report.deltas, start=1):
                w.writerow([_fmt(run.alpha), k, _fmt(delta),
                            "" if signs is None else signs[k - 1],
                            "" if run.max_deviation is None else _fmt(run.max_deviation[k - 1])])


def write_residual_csv(path, report: DiscrepancyReport, disc: Discretization) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# d1={_fmt(report.d1)},d2={_fmt(report.d2)}\n")
        w = _writer(fh)
        w.writerow(["t", "residual"])
        for t, r in zip(disc.t, report.residual_curve):
            w.writerow([_fmt(t), _fmt(r)])


def read_residual_csv(path) -> DiscrepancyReport:
    with open(path, newline="", encoding="utf-8") as fh:
        first = fh.readline().lstrip("#").strip()
        meta = dict(part.split("=") for part in first.split(","))
        rows = list(csv.DictReader(fh))
    t = np.array([float(r["t"]) for r in rows])
    res = np.array([float(r["residual"]) for r in rows])
    return DiscrepancyReport(float(meta["d1"]), float(meta["d2"]), res, t)


def write_refine_csv(path, result: RefinementResult, curve: BoundaryCurve,
                     disc: Discretization, epsilon: float, d1_after: Optional[float] = None) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        meta = [f"epsilon={_fmt(epsilon)}", f"d1_before={_fmt(result.before.d1)}",
                f"d2_before={_fmt(result.before.d2)}",
                f"projected_d2={_fmt(result.projected_d2)}",
                f"projected_ratio={_fmt(result.projected_ratio)}"]
        if d1_after is not None:
            meta.append(f"d1_after={_fmt(d1_after)}")
        fh.write("# " + ",".join(meta) + "\n")
        w = _writer(fh)
        w.writerow(["t", "s", "eta", "s_refined", "residual"])
        for n, t in enumerate(disc.t):
            w.writerow([_fmt(t), _fmt(curve.values[n]), _fmt(result.eta[n]),
                        _fmt(result.curve.values[n]), _fmt(result.before.residual_curve[n])])
