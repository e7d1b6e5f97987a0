"""Command-line entry point: ``stefan-bim <command> [options]``.

Exit status: 0 on success, 1 when a fixed-point run does not converge,
2 on a bad configuration or command line.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import svg
from .config import ConfigError, RunConfig
from .grid import BoundaryCurve, write_curve_csv, write_field_csv
from .iteration import IterationConfig, IterationError, initial_curve, run_iteration
from .operators import OperatorConfig, OperatorError
from .variational import RefinementError, discrepancy, refine_boundary

log = logging.getLogger("stefan_bim")

OVERRIDES = ("example", "beta", "horizon", "eps", "omega", "dxi", "dt", "alpha", "tol",
             "max_iter", "start")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="JSON run description")
    p.add_argument("--example", choices=["i", "ii", "iii"])
    p.add_argument("--dirichlet-g", dest="dirichlet_g", help="boundary temperature g(t)")
    p.add_argument("--neumann-q", dest="neumann_q", help="inflowing flux q(t) > 0")
    p.add_argument("--beta", help="latent heat ratio beta(x), default 1")
    p.add_argument("--horizon", type=float)
    p.add_argument("--eps", type=float, help="example iii amplitude")
    p.add_argument("--omega", type=float, help="example iii frequency")
    p.add_argument("--dxi", type=float)
    p.add_argument("--dt", type=float, help="time step, default dxi")
    p.add_argument("--alpha", type=float, help="relaxation weight in [0, 1]")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iter", dest="max_iter", type=int)
    p.add_argument("--start", choices=["extrapolate", "zero"],
                   help="flux integrand at t=0")
    p.add_argument("--initial", choices=["linear", "flux", "file"])
    p.add_argument("--c", type=float, help="slope of the linear initial guess")
    p.add_argument("--initial-path", dest="initial_path", type=Path)
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--plot", action="store_true", help="also write SVG charts")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stefan-bim",
                                     description="One-phase Stefan problem by boundary iteration.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="one fixed-point run")
    _common(p)
    p.add_argument("--dump-iterates", action="store_true", help="write iterates.csv")

    p = sub.add_parser("study", help="grid refinement study against the exact solution")
    _common(p)
    p.add_argument("--levels", type=int, default=5, help="number of levels, dxi = 0.1 / 2^k")
    p.add_argument("--snapshot-time", dest="snapshot_time", type=float, default=1.0)

    p = sub.add_parser("operators", help="compare relaxation weights")
    _common(p)
    p.add_argument("--alphas", default="1.0,0.5", help="comma-separated weights")

    p = sub.add_parser("refine", help="one linearized boundary correction")
    _common(p)
    p.add_argument("--epsilon", type=float, default=0.05)
    p.add_argument("--method", choices=["minimizer", "two_point"], default="minimizer")

    p = sub.add_parser("residual", help="Stefan residual of the converged front")
    _common(p)
    return parser


def _run_config(args) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for key in OVERRIDES:
        value = getattr(args, key, None)
        if value is not None:
            setattr(cfg, key, value)
    if args.dirichlet_g is not None or args.neumann_q is not None:
        cfg.example = None
        cfg.dirichlet_g, cfg.neumann_q = args.dirichlet_g, args.neumann_q
    if args.initial is not None:
        cfg.initial = {"kind": args.initial}
    if args.c is not None:
        cfg.initial = {**cfg.initial, "c": args.c}
        cfg.initial.setdefault("kind", "linear")
    if args.initial_path is not None:
        cfg.initial = {"kind": "file", "path": str(args.initial_path)}
    if cfg.example is None and cfg.dirichlet_g is None and cfg.neumann_q is None:
        raise ConfigError("no problem given: use --example, --dirichlet-g/--neumann-q or --config")
    return cfg


def _iteration_config(cfg: RunConfig, spec, disc) -> IterationConfig:
    try:
        return IterationConfig(tol=float(cfg.tol), max_iter=int(cfg.max_iter),
                               operator=OperatorConfig(float(cfg.alpha), start=cfg.start),
                               initial=cfg.initial_guess(spec, disc))
    except (IterationError, OperatorError) as exc:
        raise ConfigError(str(exc)) from None


def _exact_curve(exact, disc):
    return None if exact is None else BoundaryCurve(exact.interface(disc.t))


def cmd_solve(args, cfg: RunConfig) -> int:
    spec, exact = cfg.problem()
    disc = cfg.discretization()
    it = _iteration_config(cfg, spec, disc)
    rep = run_iteration(spec, disc, it, _exact_curve(exact, disc))
    write_curve_csv(args.out / "boundary.csv", rep.curve, disc)
    write_field_csv(args.out / "field.csv", rep.field, disc)
    ex.write_iterations_csv(args.out / "iterations.csv", rep)
    if args.dump_iterates:
        ex.write_iterates_csv(args.out / "iterates.csv", rep, disc)
    if args.plot:
        series = [("computed", disc.t, rep.curve.values)]
        if exact is not None:
            series.append(("exact", disc.t, exact.interface(disc.t)))
        svg.line_chart(args.out / "boundary.svg", series, "front position", "t", "s(t)")
        k = np.arange(1, rep.iterations + 1)
        svg.line_chart(args.out / "iterations.svg", [("sup-norm change", k, rep.deltas)],
                       "change per iteration", "iteration", "delta", logy=True)
    print(f"iterations={rep.iterations} converged={rep.converged} "
          f"s(T)={rep.curve.values[-1]:.10g} max_residual={rep.max_residual:.3e}")
    if exact is not None:
        dev = np.max(np.abs(rep.curve.values - exact.interface(disc.t)))
        print(f"max |s - s_exact| = {dev:.3e}")
    return 0 if rep.converged else 1


def cmd_study(args, cfg: RunConfig) -> int:
    spec, exact = cfg.problem()
    if exact is None:
        raise ConfigError("study needs an example with a known solution (i or ii)")
    if args.levels < 1:
        raise ConfigError("--levels must be at least 1")
    study = ex.StudyConfig(levels=range(args.levels), snapshot_time=args.snapshot_time)
    disc0 = study.discretization(0, spec.horizon)
    it = _iteration_config(cfg, spec, disc0)
    rows = ex.refinement_study(spec, exact, study, it)
    ex.write_study_csv(args.out / "study.csv", rows)
    print(f"{'dxi':>10} {'E':>12} {'p':>7} {'iters':>6}")
    for r in rows:
        p = "" if r.order is None else f"{r.order:.3f}"
        print(f"{r.dxi:10.6f} {r.error:12.4e} {p:>7} {r.iterations:6d}")
    if args.plot:
        svg.line_chart(args.out / "study.svg",
                       [("E at t=%g" % args.snapshot_time, [r.dxi for r in rows],
                         [r.error for r in rows])],
                       "error vs grid size", "dxi", "E", logx=True, logy=True)
    return 0 if all(r.converged for r in rows) else 1


def cmd_operators(args, cfg: RunConfig) -> int:
    spec, exact = cfg.problem()
    disc = cfg.discretization()
    try:
        alphas = [float(a) for a in args.alphas.split(",") if a.strip()]
    except ValueError:
        raise ConfigError(f"bad --alphas {args.alphas!r}") from None
    if not cfg.initial:
        # start away from the fixed point so the pure-R overshoot is visible
        cfg.initial = {"kind": "linear", "c": 0.5}
    it = _iteration_config(cfg, spec, disc)
    reference = _exact_curve(exact, disc)
    if reference is None:
        # no closed form: measure against a tightly converged relaxed run
        tight = replace(it, tol=min(it.tol, 1e-12), max_iter=max(it.max_iter, 1000),
                        operator=replace(it.operator, alpha=0.5))
        reference = run_iteration(spec, disc, tight).curve
    runs = ex.operator_comparison(spec, disc, alphas, it, reference)
    ex.write_operators_csv(args.out / "operators.csv", runs)
    for run in runs:
        rep = run.report
        alt = "" if rep.sign_pattern is None else f" alternating={ex.alternating_run(rep.sign_pattern)}"
        print(f"alpha={run.alpha:g} iterations={rep.iterations} converged={rep.converged}{alt}")
    if args.plot:
        series = [(f"alpha={r.alpha:g}", np.arange(1, r.report.iterations + 1), r.report.deltas)
                  for r in runs]
        svg.line_chart(args.out / "operators.svg", series, "change per iteration",
                       "iteration", "delta", logy=True)
    return 0 if all(r.report.converged for r in runs) else 1


def cmd_refine(args, cfg: RunConfig) -> int:
    spec, _ = cfg.problem()
    disc = cfg.discretization()
    it = _iteration_config(cfg, spec, disc)
    curve = initial_curve(spec, disc, it.initial)
    result = refine_boundary(spec, disc, curve, args.epsilon, args.method)
    after = discrepancy(spec, disc, result.curve)
    ex.write_refine_csv(args.out / "refine.csv", result, curve, disc, args.epsilon, after.d1)
    print(f"D2 before={result.before.d2:.6e} projected={result.projected_d2:.6e} "
          f"ratio={result.projected_ratio:.4f} (1-2eps={1 - 2 * args.epsilon:.4f}) "
          f"D1 after re-solve={after.d1:.6e}")
    if args.plot:
        svg.line_chart(args.out / "refine.svg",
                       [("s", disc.t, curve.values), ("refined", disc.t, result.curve.values)],
                       "linearized correction", "t", "s(t)")
    return 0


def cmd_residual(args, cfg: RunConfig) -> int:
    spec, _ = cfg.problem()
    disc = cfg.discretization()
    it = _iteration_config(cfg, spec, disc)
    rep = run_iteration(spec, disc, it)
    report = ex.stefan_residual_report(spec, disc, rep.curve, rep.field)
    ex.write_residual_csv(args.out / "residual.csv", report, disc)
    print(f"d1={report.d1:.6e} d2={report.d2:.6e} max_residual={report.max_residual:.3e} "
          f"converged={rep.converged}")
    if args.plot:
        svg.line_chart(args.out / "residual.svg", [("residual", disc.t, report.residual_curve)],
                       "Stefan residual", "t", "beta ds/dt + U_x")
    return 0 if rep.converged else 1


COMMANDS = {"solve": cmd_solve, "study": cmd_study, "operators": cmd_operators,
            "refine": cmd_refine, "residual": cmd_residual}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _run_config(args)
        args.out.mkdir(parents=True, exist_ok=True)
        return COMMANDS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IterationError, RefinementError, OperatorError, ex.StudyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
