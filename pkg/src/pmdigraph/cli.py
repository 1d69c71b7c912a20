"""Command-line harness.

Subcommands::

    pmdigraph simulate --n 2000 --m 1 --trials 200 --seed 1 --out results/
    pmdigraph sweep    --n 102400 --m 0,1 --stride 64 --dense 200 --svg --out results/
    pmdigraph analytic --m all --n 1000000
    pmdigraph moments  --n 1000000 --m 1 --k 20 --delta 0.3

Every file starts with a ``#`` header recording the version and the full
configuration. Exit status is 0 when every computation completed and
converged, 1 when some minimization did not converge, and 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .certificate import c_m, gamma_closed, k_n
from .experiment import run_trials, summarize
from .model import INF, expected_out_degree
from .moments import H_SIGMA, LAMBDA, moment_report
from .optimizer import SimplexConfig, iter_sweep, slope_fit, zero_crossing, SweepTrajectory
from .tables import fmt, render, write_csv

log = logging.getLogger("pmdigraph")

SIM_COLUMNS = ["trial_index", "derived_seed", "matching_size", "has_pm",
               "witness_K_size", "n_components", "largest_component_size"]
SWEEP_COLUMNS = ["t", "x", "y", "z", "u", "rho", "H_min", "converged"]


def parse_m(text: str):
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return INF
    try:
        m = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"m must be a non-negative integer or 'inf', got {text!r}")
    if m < 0:
        raise argparse.ArgumentTypeError("m must be non-negative")
    return m


def parse_m_list(text: str):
    return [parse_m(part) for part in text.split(",") if part.strip()]


def positive_int(text: str) -> int:
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def seed_int(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def m_label(m) -> str:
    return "inf" if m == INF else str(m)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pmdigraph", description=__doc__.split("\n\n")[0])
    p.add_argument("--version", action="version", version=f"pmdigraph {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="Monte Carlo perfect-matching trials")
    s.add_argument("--n", type=positive_int, required=True)
    s.add_argument("--m", type=parse_m, default=1)
    s.add_argument("--one-round", action="store_true", help="round 1 only, i.e. B_n(1)")
    s.add_argument("--trials", type=positive_int, default=100)
    s.add_argument("--seed", type=seed_int, default=0)
    s.add_argument("--workers", type=positive_int, default=1)
    s.add_argument("--out", type=Path, default=Path("."))

    w = sub.add_parser("sweep", help="minimize H over the t grid with warm starts")
    w.add_argument("--n", type=positive_int, required=True)
    w.add_argument("--m", type=parse_m_list, default=[1], help="one value or a comma list, e.g. 0,1")
    w.add_argument("--t-from", type=float, default=None)
    w.add_argument("--t-to", type=float, default=None)
    w.add_argument("--stride", type=positive_int, default=1)
    w.add_argument("--dense", type=int, default=0,
                   help="evaluate this many leading grid points at stride 1 before striding")
    w.add_argument("--svg", action="store_true", help="also render the curves to an SVG figure")
    w.add_argument("--out", type=Path, default=Path("."))
    w.add_argument("--func-tol", type=float, default=None)
    w.add_argument("--opt-tol", type=float, default=None)
    w.add_argument("--max-iters", type=positive_int, default=None)
    w.add_argument("--penalty", type=float, default=None)
    w.add_argument("--restarts", type=int, default=None)

    a = sub.add_parser("analytic", help="closed-form rates and exponents")
    a.add_argument("--m", default="all", help="integer, 'inf', or 'all'")
    a.add_argument("--n", type=positive_int, default=10**6, help="n used for k_n")
    a.add_argument("--out", type=Path, default=None)

    mo = sub.add_parser("moments", help="log-space moment formulas")
    mo.add_argument("--n", type=positive_int, required=True)
    mo.add_argument("--m", type=parse_m, default=1)
    mo.add_argument("--k", type=positive_int, default=None)
    mo.add_argument("--delta", type=float, default=0.3)
    mo.add_argument("--out", type=Path, default=None)
    return p


# simulate

def cmd_simulate(args) -> int:
    label = "1round" if args.one_round else f"m{m_label(args.m)}"
    stem = f"simulate_n{args.n}_{label}_seed{args.seed}"
    config = {"n": args.n, "m": None if args.one_round else m_label(args.m),
              "one_round": args.one_round, "trials": args.trials, "seed": args.seed}
    results = run_trials(args.n, args.m, args.trials, args.seed, args.one_round, args.workers)
    rows = [[r.trial_index, r.derived_seed, r.matching_size, r.has_pm, r.witness_K_size,
             r.n_components, r.largest_component_size] for r in results]
    summary = summarize(results, args.n)
    args.out.mkdir(parents=True, exist_ok=True)
    write_csv(args.out / f"{stem}.csv", "simulate", config, SIM_COLUMNS, rows)
    write_csv(args.out / f"{stem}_summary.csv", "simulate", config,
              ["name", "value"], list(summary.items()))
    print(render("simulate", config, ["name", "value"], list(summary.items())), end="")
    return 0


# sweep

def sweep_ks(n: int, t_from, t_to, stride: int, dense: int) -> list[int]:
    top = math.ceil(n / 2)
    k_from = 1 if t_from is None else max(1, round(t_from * n))
    k_to = top if t_to is None else min(top, round(t_to * n))
    if k_from > k_to:
        raise ValueError(f"empty grid: k_from={k_from} > k_to={k_to}")
    ks = list(range(k_from, min(k_from + dense, k_to + 1)))
    start = ks[-1] + stride if ks else k_from
    ks += list(range(start, k_to + 1, stride))
    if ks[-1] != k_to:
        ks.append(k_to)
    return ks


def sweep_summary(traj: SweepTrajectory) -> dict:
    H = traj.H
    i = int(H.argmin())
    last = traj.points[-1]
    out = {
        "points": len(traj.points),
        "all_converged": traj.all_converged,
        "t_of_min": traj.points[i].t,
        "min_H": float(H[i]),
        "t_last": last.t,
        "H_last": last.H_min,
        "zero_crossing": zero_crossing(traj),
        "slope_fit_100": None,
    }
    ks = [p.k for p in traj.points[:100]]
    if ks == list(range(1, 101)):
        out["slope_fit_100"] = slope_fit(traj, 100)
    return out


def cmd_sweep(args) -> int:
    config = SimplexConfig()
    try:
        config = SimplexConfig(
            func_tol=args.func_tol if args.func_tol is not None else config.func_tol,
            opt_tol=args.opt_tol if args.opt_tol is not None else config.opt_tol,
            max_iters=args.max_iters if args.max_iters is not None else config.max_iters,
            penalty_P=args.penalty if args.penalty is not None else config.penalty_P,
            restart_count=args.restarts if args.restarts is not None else config.restart_count,
        )
        ks = sweep_ks(args.n, args.t_from, args.t_to, args.stride, max(args.dense, 0))
    except ValueError as exc:
        raise UsageError(str(exc))
    if any(m == INF for m in args.m):
        raise UsageError("sweep needs a finite m")
    args.out.mkdir(parents=True, exist_ok=True)
    trajectories = []
    for m in args.m:
        header = {"n": args.n, "m": m, "t_from": ks[0] / args.n, "t_to": ks[-1] / args.n,
                  "stride": args.stride, "dense": args.dense, "func_tol": config.func_tol,
                  "opt_tol": config.opt_tol, "max_iters": config.max_iters,
                  "penalty_P": config.penalty_P, "restart_count": config.restart_count}
        traj = SweepTrajectory(args.n, m, list(iter_sweep(args.n, m, ks, config)))
        trajectories.append(traj)
        stem = f"sweep_n{args.n}_m{m}"
        write_csv(args.out / f"{stem}.csv", "sweep", header, SWEEP_COLUMNS,
                  [[p.t, *p.vars.as_tuple(), p.rho, p.H_min, p.converged] for p in traj.points])
        write_csv(args.out / f"{stem}_plot.csv", "sweep", header, ["t", "H_min"],
                  [[p.t, p.H_min] for p in traj.points])
        summary = sweep_summary(traj)
        write_csv(args.out / f"{stem}_summary.csv", "sweep", header, ["name", "value"],
                  list(summary.items()))
        print(render("sweep", header, ["name", "value"], list(summary.items())), end="")
    if args.svg:
        from .plotting import plot_sweeps
        ms = "_".join(str(m) for m in args.m)
        plot_sweeps(trajectories, args.out / f"sweep_n{args.n}_m{ms}.svg")
    return 0 if all(t.all_converged for t in trajectories) else 1


# analytic

ANALYTIC_COLUMNS = ["m", "gamma", "c", "d", "k_n"]


def analytic_rows(ms, n: int) -> list[list]:
    rows = []
    for m in ms:
        c = c_m(m) if m == INF or m >= 1 else None
        kn = k_n(m, n) if m != INF and m >= 1 else None
        rows.append([m_label(m), gamma_closed(m), c, expected_out_degree(m), kn])
    return rows


def cmd_analytic(args) -> int:
    if args.m == "all":
        ms = [0, 1, 2, 3, 4, 5, INF]
    else:
        try:
            ms = [parse_m(args.m)]
        except argparse.ArgumentTypeError as exc:
            raise UsageError(str(exc))
    config = {"m": args.m, "n": args.n}
    table = render("analytic", config, ANALYTIC_COLUMNS, analytic_rows(ms, args.n))
    consts = render("analytic", config, ["name", "value"], [["H_sigma", H_SIGMA], ["lambda", LAMBDA]])
    print(table, end="")
    print(consts, end="")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_csv(args.out / "analytic.csv", "analytic", config, ANALYTIC_COLUMNS, analytic_rows(ms, args.n))
        write_csv(args.out / "analytic_constants.csv", "analytic", config, ["name", "value"],
                  [["H_sigma", H_SIGMA], ["lambda", LAMBDA]])
    return 0


# moments

def cmd_moments(args) -> int:
    if not 0 < args.delta < 0.5:
        raise UsageError("delta must lie in (0, 1/2)")
    if args.k is not None and args.k > math.isqrt(args.n):
        raise UsageError("k must be <= sqrt(n)")
    m = None if args.m == INF else args.m
    try:
        rep = moment_report(args.n, m, args.k, args.delta)
    except ValueError as exc:
        raise UsageError(str(exc))
    config = {"n": args.n, "m": m_label(args.m), "k": args.k, "delta": args.delta}
    print(render("moments", config, ["name", "value"], rep.rows()), end="")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        write_csv(args.out / f"moments_n{args.n}.csv", "moments", config, ["name", "value"], rep.rows())
    return 0


class UsageError(Exception):
    pass


COMMANDS = {"simulate": cmd_simulate, "sweep": cmd_sweep, "analytic": cmd_analytic, "moments": cmd_moments}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pmdigraph {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
