"""Command-line front end.

Every file written with ``--out`` (or by ``figures``) gets a sibling
``<name>.manifest.json`` recording the command, parameters, seeds and the
CSV schema version.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone

from . import __version__
from .finite import finite_optimal_rate
from .montecarlo import empirical_rate_scan, mix_seed
from .optimizer import critical_points, sweep_noise, AT_ONE_TOL, AT_ZERO_TOL
from .probcore import DomainError, check_noise, check_rate, combined_error, distortion_rate
from .ratefunction import alpha, decay_rate

SCHEMA_VERSION = "1"
SWEEP_COLUMNS = ["p", "r_star", "r_dagger", "i_star", "i_dagger", "r_star_gauss"]
SIM_COLUMNS = ["r", "l", "rho", "p_hat", "ci95", "p_exact"]
FIG1_COLUMNS = ["p", "r_star", "r_dagger", "r_star_gauss"]
FIG2_COLUMNS = ["p", "i_star", "i_dagger"]
FIG3_COLUMNS = ["p", "r_star", "r_star_gauss", "r_finite_exact", "r_empirical",
                "r_empirical_ties"]

FIG_P_STEP = 0.002
FIG_P_MAX = 0.45
FIG3_C = 50
FIG3_P_GRID = [k / 100 for k in range(1, 26)]
FIG3_R_STEP = 0.02
FIG3_TRIALS = 100_000
FIG3_SEED = 20110731


class UsageError(Exception):
    pass


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".9g")
    return str(x)


def json_number(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row.get(col)) for col in columns])
    return buf.getvalue()


def json_text(columns, rows):
    data = [{col: json_number(row.get(col)) for col in columns} for row in rows]
    return json.dumps(data, indent=2) + "\n"


def atomic_write(path, text):
    """Write text to path via a temp file so no partial output survives."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def manifest(command, params, seeds=(), columns=None):
    return {
        "command": command,
        "params": params,
        "seeds": list(seeds),
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "columns": columns,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def emit(text, out, meta):
    if out is None:
        sys.stdout.write(text)
        return
    atomic_write(out, text)
    atomic_write(out + ".manifest.json", json.dumps(meta, indent=2) + "\n")


def grid(lo, hi, step, name):
    if step <= 0:
        raise UsageError(f"--{name}-step must be positive")
    if hi < lo:
        raise UsageError(f"empty range: --{name}-max {hi} < --{name}-min {lo}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + k * step, 12) for k in range(n)]


def sweep_rows(p_grid, arms):
    rows = sweep_noise(p_grid, arms)
    for row in rows:
        row.pop("boundary", None)
    return rows


def cmd_ratefn(args):
    p = check_noise(args.p)
    r = check_rate(args.r)
    if r == 0.0 and args.arm == "exact":
        raise DomainError("exact arm needs 0 < r <= 1; use --arm level0 for r = 0")
    report = {
        "arm": args.arm,
        "p": p,
        "r": r,
        "decay_rate": json_number(decay_rate(p, r, args.arm)),
        "distortion": distortion_rate(r),
        "rho": combined_error(p, distortion_rate(r)),
        "alpha": alpha(p, r),
    }
    print(json.dumps(report, indent=2))


def cmd_sweep(args):
    p_grid = grid(args.p_min, args.p_max, args.p_step, "p")
    for p in p_grid:
        check_noise(p)
    arms = tuple(a.strip() for a in args.arms.split(",") if a.strip())
    bad = set(arms) - {"exact", "gaussian"}
    if bad or "exact" not in arms:
        raise UsageError(f"--arms must include exact and may add gaussian, got {args.arms!r}")
    rows = sweep_rows(p_grid, arms)
    render = json_text if args.format == "json" else csv_text
    params = {"p_min": args.p_min, "p_max": args.p_max, "p_step": args.p_step,
              "arms": list(arms), "format": args.format}
    emit(render(SWEEP_COLUMNS, rows), args.out, manifest("sweep", params, columns=SWEEP_COLUMNS))


def cmd_critical(args):
    cp = critical_points(tol=args.tol)
    if not cp.p1 < cp.p0:
        raise RuntimeError(f"critical points out of order: p1={cp.p1} p0={cp.p0}")
    print(json.dumps({
        "p0": cp.p0,
        "p1": cp.p1,
        "p1_slope_check": cp.p1_slope,
        "detectors_agree": cp.detectors_agree,
        "tolerance": cp.tol,
        "at_zero_tol": AT_ZERO_TOL,
        "at_one_tol": AT_ONE_TOL,
    }, indent=2))


def cmd_simulate(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    if args.r is not None:
        r_grid = [args.r]
    elif None not in (args.r_min, args.r_max, args.r_step):
        r_grid = grid(args.r_min, args.r_max, args.r_step, "r")
    else:
        raise UsageError("give --r or all of --r-min/--r-max/--r-step")
    for r in r_grid:
        check_rate(r, allow_zero=False)
    check_noise(args.p)
    scan = empirical_rate_scan(args.c, args.p, r_grid, args.trials, args.seed,
                               workers=args.workers)
    render = json_text if args.format == "json" else csv_text
    params = {"c": args.c, "p": args.p, "r_grid": r_grid, "trials": args.trials,
              "format": args.format}
    emit(render(SIM_COLUMNS, scan.rows), args.out,
         manifest("simulate", params, seeds=[args.seed], columns=SIM_COLUMNS))


def figures(out_dir, p_step=FIG_P_STEP, trials=FIG3_TRIALS, seed=FIG3_SEED, workers=1):
    """Write the three figure tables (and manifests) into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    p_grid = grid(0.0, FIG_P_MAX, p_step, "p")
    rows = sweep_rows(p_grid, ("exact", "gaussian"))
    base = {"p_min": 0.0, "p_max": FIG_P_MAX, "p_step": p_step}
    for name, cols in (("fig1_levels", FIG1_COLUMNS), ("fig2_rates", FIG2_COLUMNS)):
        emit(csv_text(cols, rows), os.path.join(out_dir, name + ".csv"),
             manifest("figures/" + name, base, columns=cols))

    r_grid = grid(FIG3_R_STEP, 1.0, FIG3_R_STEP, "r")
    by_p = {row["p"]: row for row in sweep_rows(FIG3_P_GRID, ("exact", "gaussian"))}
    fig3 = []
    for i, p in enumerate(FIG3_P_GRID):
        # one seed per noise level, derived the same way as scan points
        scan = empirical_rate_scan(FIG3_C, p, r_grid, trials, mix_seed(seed, i),
                                   workers=workers)
        fig3.append({
            "p": p,
            "r_star": by_p[p]["r_star"],
            "r_star_gauss": by_p[p]["r_star_gauss"],
            "r_finite_exact": finite_optimal_rate(FIG3_C, p, r_grid)[0],
            "r_empirical": scan.r_best,
            "r_empirical_ties": len(scan.indistinguishable),
        })
    params = {"c": FIG3_C, "p_grid": FIG3_P_GRID, "r_grid": r_grid, "trials": trials,
              "seed_rule": "mix_seed(seed, p_index) per noise level, then mix_seed(., r_index)"}
    emit(csv_text(FIG3_COLUMNS, fig3), os.path.join(out_dir, "fig3_comparison.csv"),
         manifest("figures/fig3_comparison", params, seeds=[seed], columns=FIG3_COLUMNS))


def cmd_figures(args):
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    figures(args.out_dir, p_step=args.p_step, trials=args.trials, seed=args.seed,
            workers=args.workers)


def seed_arg(text):
    value = int(text)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser():
    parser = argparse.ArgumentParser(
        prog="noisyagg",
        description="Decay rates of majority-vote error for capacity-limited noisy sensors.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ratefn", help="decay rate at one (p, r)")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--arm", choices=["exact", "gaussian", "level0"], default="exact")
    p.add_argument("--format", choices=["json"], default="json")
    p.set_defaults(func=cmd_ratefn)

    p = sub.add_parser("sweep", help="optimal and pessimistic levels over a noise grid")
    p.add_argument("--p-min", type=float, default=0.0)
    p.add_argument("--p-max", type=float, default=FIG_P_MAX)
    p.add_argument("--p-step", type=float, default=FIG_P_STEP)
    p.add_argument("--arms", default="exact,gaussian")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("critical", help="critical noise levels p0 and p1")
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("simulate", help="Monte Carlo error rates at finite capacity")
    p.add_argument("--c", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--r", type=float)
    p.add_argument("--r-min", type=float)
    p.add_argument("--r-max", type=float)
    p.add_argument("--r-step", type=float)
    p.add_argument("--trials", type=int, default=FIG3_TRIALS)
    p.add_argument("--seed", type=seed_arg, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("figures", help="write fig1_levels, fig2_rates and fig3_comparison")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--p-step", type=float, default=FIG_P_STEP)
    p.add_argument("--trials", type=int, default=FIG3_TRIALS)
    p.add_argument("--seed", type=seed_arg, default=FIG3_SEED)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (DomainError, UsageError) as exc:
        print(f"noisyagg {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        path = exc.filename or getattr(args, "out", None) or getattr(args, "out_dir", "")
        print(f"noisyagg {args.command}: cannot write {path}: {exc.strerror}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"noisyagg {args.command}: internal error: {exc}", file=sys.stderr)
        return 1
    return 0
