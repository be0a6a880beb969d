"""Command-line interface.

Subcommands: dist, ci, sim, scaling, lfi.  JSON results go to stdout; CSV
reports (and their companion figures) go to --out.  Exit codes: 0 success,
2 input error, 3 dimension mismatch, 4 condition A1 violated, 5 missing
truth oracle, 6 simulator failure.
"""

from __future__ import annotations

import argparse
import json
import shlex
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import experiments, plotting, sampleio
from .errors import (
    A1Violated,
    DimensionMismatch,
    NoOracle,
    SimulatorFailure,
    SwinferError,
)
from .intervals import check_a1, ci_sliced
from .lfi import ParamGrid, lfi_confidence_set, toggle_simulator
from .models import MODEL_IDS, ModelId
from .resampling import BootstrapConfig, bootstrap_ci, hybrid_ci
from .transport import TrimOrder, sample_directions, sliced_wasserstein

EXIT_INPUT = 2
EXIT_DIMENSION = 3
EXIT_A1 = 4
EXIT_ORACLE = 5
EXIT_SIMULATOR = 6


def _emit(payload: dict) -> None:
    json.dump(payload, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _load_pair(args):
    X = sampleio.read_sample(args.x, header=args.header)
    Y = sampleio.read_sample(args.y, header=args.header)
    if X.d != Y.d:
        raise DimensionMismatch(f"--x has d={X.d} but --y has d={Y.d}")
    return X, Y


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _size_grid(text: str) -> list[int]:
    """Either a comma list of sizes or lo:hi:k for a geometric grid."""
    if ":" in text:
        lo, hi, k = text.split(":")
        sizes = np.unique(
            np.rint(np.geomspace(float(lo), float(hi), int(k))).astype(int)
        )
        return [int(s) for s in sizes]
    return _int_list(text)


def cmd_dist(args) -> int:
    X, Y = _load_pair(args)
    to = TrimOrder(args.r, args.delta)
    if args.sliced or X.d > 1:
        if not args.sliced:
            raise DimensionMismatch(
                f"data is {X.d}-dimensional; pass --sliced to project"
            )
        dirs = sample_directions(X.d, args.num_dirs, args.seed)
        estimate = sliced_wasserstein(X, Y, to, dirs)
        n_dirs, seed = args.num_dirs, args.seed
    else:
        dirs = sample_directions(1, 1, args.seed)
        estimate = sliced_wasserstein(X, Y, to, dirs)
        n_dirs, seed = None, None
    _emit(
        {"estimate": estimate, "r": args.r, "delta": args.delta,
         "N": n_dirs, "seed": seed}
    )
    return 0


def cmd_ci(args) -> int:
    X, Y = _load_pair(args)
    to = TrimOrder(args.r, args.delta)
    n_dirs = 1 if X.d == 1 else args.num_dirs
    a1_ok = check_a1(args.delta, args.alpha / n_dirs, X.n, Y.n, args.band)
    if args.method == "finite":
        interval = ci_sliced(X, Y, to, args.alpha, n_dirs, args.seed, args.band)
    elif args.method == "boot":
        cfg = BootstrapConfig(B=args.boot_reps, seed=args.seed, N=n_dirs,
                              alpha=args.alpha)
        interval = bootstrap_ci(X, Y, to, cfg)
    else:
        cfg = BootstrapConfig(B=args.boot_reps, seed=args.seed + 1, N=n_dirs,
                              alpha=args.alpha)
        interval = hybrid_ci(X, Y, to, args.alpha, n_dirs, args.seed, args.band, cfg)
    payload = {
        "lower": interval.lower,
        "upper": interval.upper,
        "method": args.method,
        "a1_ok": a1_ok,
        "params": interval.params,
    }
    if args.method == "hybrid":
        payload["branch"] = interval.params["branch"]
    _emit(payload)
    return 0


def cmd_sim(args) -> int:
    model_ids = [tok for tok in args.models.split(",") if tok]
    for tok in model_ids:
        if tok not in MODEL_IDS:
            raise SwinferError(f"unknown model {tok!r}; known: {MODEL_IDS}")
    methods = [tok for tok in args.methods.split(",") if tok]
    for tok in methods:
        if tok not in ("finite", "boot", "hybrid"):
            raise SwinferError(f"unknown method {tok!r}")
    sizes = _int_list(args.sizes)
    settings = experiments.SimSettings(
        r=args.r, delta=args.delta, alpha=args.alpha, N=args.num_dirs,
        B=args.boot_reps, band=args.band,
    )
    records, truths = experiments.run_simulation(
        [ModelId(tok) for tok in model_ids],
        methods,
        sizes,
        args.reps,
        master_seed=args.seed,
        settings=settings,
        threads=args.threads,
    )
    out = Path(args.out)
    sampleio.write_records_csv(records, out, fieldnames=experiments.EXPERIMENT_FIELDS)
    figures = []
    if not args.no_plot and records:
        figures = [
            str(p)
            for p in plotting.render_sim_figure(records, 1.0 - args.alpha, out)
        ]
    _emit(
        {
            "out": str(out),
            "figures": figures,
            "models": model_ids,
            "methods": methods,
            "sizes": sizes,
            "reps": args.reps,
            "seed": args.seed,
            "truths": {f"{mid}@{size}": val for (mid, size), val in truths.items()},
        }
    )
    return 0


def cmd_scaling(args) -> int:
    sizes = _size_grid(args.sizes)
    if len(sizes) < 2:
        raise SwinferError("need at least two sizes to fit a slope")
    records, slopes = experiments.run_scaling(
        args.model,
        _float_list(args.r),
        _float_list(args.Delta),
        sizes,
        args.reps,
        master_seed=args.seed,
        alpha=args.alpha,
        delta=args.delta,
        band=args.band,
        threads=args.threads,
    )
    out = Path(args.out)
    sampleio.write_records_csv(records, out, fieldnames=experiments.SCALING_FIELDS)
    figure = None
    if not args.no_plot:
        figure = str(plotting.render_scaling_figure(slopes, args.model, out))
    _emit({"model": args.model, "out": str(out), "figure": figure, "slopes": slopes})
    return 0


def _exec_simulator(command: str):
    argv = shlex.split(command)

    def simulate(theta, m, seed):
        theta_csv = ",".join("%.17g" % v for v in np.asarray(theta, dtype=float))
        proc = subprocess.run(
            argv + [theta_csv, str(m), str(seed)],
            capture_output=True,
            text=True,
        )
        if proc.returncode != 0:
            raise SimulatorFailure(
                f"simulator command exited with {proc.returncode}: {proc.stderr.strip()}"
            )
        rows = [
            [float(tok) for tok in line.split(",")]
            for line in proc.stdout.splitlines()
            if line.strip()
        ]
        return np.asarray(rows, dtype=float)

    return simulate


def cmd_lfi(args) -> int:
    observed = sampleio.read_sample(args.obs, header=args.header)
    if not Path(args.grid).read_text().strip():
        raise SwinferError(f"grid file {args.grid} is empty")
    try:
        grid_pts = np.loadtxt(args.grid, delimiter=",", ndmin=2)
    except Exception as exc:
        raise SwinferError(f"could not parse grid file {args.grid}: {exc}") from exc
    grid = ParamGrid(grid_pts)
    if args.simulator == "toggle":
        simulator = toggle_simulator
    elif args.simulator.startswith("exec:"):
        simulator = _exec_simulator(args.simulator[len("exec:"):])
    else:
        raise SwinferError(
            f"unknown simulator {args.simulator!r}; use 'toggle' or 'exec:CMD'"
        )
    to = TrimOrder(args.r, args.delta)
    n_dirs = 1 if observed.d == 1 else args.num_dirs
    result = lfi_confidence_set(
        observed, simulator, grid, args.m, args.eps, to, args.alpha,
        n_dirs, args.seed, args.band,
    )
    if args.out:
        lines = ["theta_index," + ",".join(
            f"theta_{k}" for k in range(grid.D)
        ) + ",lower,upper,accepted"]
        for idx in range(grid.M):
            theta_csv = ",".join("%.17g" % v for v in grid.points[idx])
            lines.append(
                f"{idx},{theta_csv},{'%.17g' % result.lower[idx]},"
                f"{'%.17g' % result.upper[idx]},{int(result.accepted_mask[idx])}"
            )
        Path(args.out).write_text("\n".join(lines) + "\n")
    accepted_idx = [int(i) for i in np.flatnonzero(result.accepted_mask)]
    _emit(
        {
            "epsilon": result.epsilon,
            "accepted_indices": accepted_idx,
            "accepted": [list(map(float, grid.points[i])) for i in accepted_idx],
            "n": observed.n,
            "m": args.m,
            "alpha": args.alpha,
            "out": args.out,
        }
    )
    return 0


def _add_data_args(p):
    p.add_argument("--x", required=True, help="CSV file with the first sample")
    p.add_argument("--y", required=True, help="CSV file with the second sample")
    p.add_argument("--header", action="store_true", help="skip one header line")


def _add_trim_args(p, default_r=2.0, default_delta=0.1):
    p.add_argument("--r", type=float, default=default_r, help="distance order")
    p.add_argument("--delta", type=float, default=default_delta,
                   help="trimming constant in [0, 1/2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swinfer",
        description="Trimmed sliced Wasserstein distances and confidence intervals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dist", help="point estimate of the trimmed (sliced) distance")
    _add_data_args(p)
    _add_trim_args(p, default_delta=0.0)
    p.add_argument("--sliced", action="store_true", help="Monte-Carlo sliced estimate")
    p.add_argument("--num-dirs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_dist)

    p = sub.add_parser("ci", help="confidence interval for the trimmed sliced distance")
    _add_data_args(p)
    _add_trim_args(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--band", choices=["dkw", "relvc"], default="dkw")
    p.add_argument("--method", choices=["finite", "boot", "hybrid"], default="finite")
    p.add_argument("--boot-reps", type=int, default=1000)
    p.add_argument("--num-dirs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_ci)

    p = sub.add_parser("sim", help="coverage/length/runtime simulation study")
    p.add_argument("--models", required=True, help="comma list, e.g. m1,m2,m3")
    p.add_argument("--methods", required=True, help="comma list from finite,boot,hybrid")
    p.add_argument("--sizes", required=True, help="comma list of sample sizes")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--seed", type=int, default=0)
    _add_trim_args(p)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--band", choices=["dkw", "relvc"], default="dkw")
    p.add_argument("--num-dirs", type=int, default=500)
    p.add_argument("--boot-reps", type=int, default=1000)
    p.add_argument("--threads", type=int, default=None,
                   help="worker count (default: SWINFER_THREADS or 1)")
    p.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("scaling", help="interval-length scaling study")
    p.add_argument("--model", choices=["m6i", "m6ii"], required=True)
    p.add_argument("--r", default="2", help="comma list of orders")
    p.add_argument("--Delta", default="0", help="comma list of separations")
    p.add_argument("--sizes", required=True,
                   help="comma list or lo:hi:k geometric grid")
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--out", required=True, help="CSV output path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--band", choices=["dkw", "relvc"], default="dkw")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("lfi", help="likelihood-free confidence set over a grid")
    p.add_argument("--obs", required=True, help="CSV file with the observed sample")
    p.add_argument("--simulator", required=True, help="'toggle' or 'exec:CMD'")
    p.add_argument("--grid", required=True, help="CSV file of candidate thetas")
    p.add_argument("--m", type=int, required=True, help="synthetic sample size")
    p.add_argument("--eps", type=float, default=0.0, help="acceptance threshold")
    p.add_argument("--alpha", type=float, default=0.05)
    _add_trim_args(p, default_r=1.0)
    p.add_argument("--band", choices=["dkw", "relvc"], default="dkw")
    p.add_argument("--num-dirs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", default=None, help="per-theta interval CSV path")
    p.set_defaults(func=cmd_lfi)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except A1Violated as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_A1
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except NoOracle as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except SimulatorFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIMULATOR
    except (SwinferError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
