"""Simulation harness: coverage/length/runtime studies and the rate-scaling
study for the interval lengths.

Every RNG stream derives from (master seed, model, size, rep), so results
are identical for any worker count; records are emitted in a canonical sort
order.  Truth values come from the closed-form oracles where registered and
from a seed-pinned large-sample plug-in reference (cached on disk under a
content hash) otherwise.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NoOracle
from .intervals import ci_1d, ci_sliced
from .models import ModelId, sample_pair, true_sw_oracle
from .resampling import BootstrapConfig, bootstrap_ci, min_spacing
from .transport import (
    Sample,
    SortedProjection,
    TrimOrder,
    _trimmed_power_many,
    sample_directions,
)

__all__ = [
    "ExperimentRecord",
    "ScalingRecord",
    "SimSettings",
    "EXPERIMENT_FIELDS",
    "SCALING_FIELDS",
    "run_simulation",
    "run_scaling",
    "fit_length_slopes",
    "reference_sw",
    "resolve_threads",
    "default_cache_dir",
]

REFERENCE_N = 10**6
REFERENCE_DIRS = 2000
REFERENCE_SEED = 202406


@dataclass(frozen=True)
class ExperimentRecord:
    model: str
    method: str
    n: int
    m: int
    rep: int
    covered: bool
    length: float
    runtime_s: float
    lower: float
    upper: float
    seed: int


@dataclass(frozen=True)
class ScalingRecord:
    model: str
    r: float
    Delta: float
    n: int
    rep: int
    lower: float
    upper: float
    length: float
    seed: int


EXPERIMENT_FIELDS = [f.name for f in dataclasses.fields(ExperimentRecord)]
SCALING_FIELDS = [f.name for f in dataclasses.fields(ScalingRecord)]


@dataclass(frozen=True)
class SimSettings:
    """Shared protocol settings for the coverage study."""

    r: float = 2.0
    delta: float = 0.1
    alpha: float = 0.05
    N: int = 500
    B: int = 1000
    band: str = "dkw"


def resolve_threads(threads: int | None = None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("SWINFER_THREADS")
    if env:
        return max(1, int(env))
    return 1


def default_cache_dir() -> Path:
    env = os.environ.get("SWINFER_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "swinfer"


def _model_key(model: ModelId) -> str:
    return json.dumps({"id": model.id, "params": model.params}, sort_keys=True)


def _task_seed(master_seed: int, model: ModelId, size: int, rep: int, tag: int) -> int:
    crc = zlib.crc32(_model_key(model).encode())
    ss = np.random.SeedSequence([master_seed, crc, size, rep, tag])
    return int(ss.generate_state(1)[0])


def reference_sw(
    model: ModelId,
    to: TrimOrder,
    cache_dir: Path | None = None,
    n_ref: int = REFERENCE_N,
    n_dirs: int = REFERENCE_DIRS,
    seed: int = REFERENCE_SEED,
) -> float:
    """Large-sample plug-in reference distance, cached on disk.

    The cache key hashes the model, trim order and reference protocol, so a
    stale file can never be served for different settings.
    """
    cache_dir = Path(cache_dir) if cache_dir else default_cache_dir()
    key = json.dumps(
        {
            "model": _model_key(model),
            "r": to.r,
            "delta": to.delta,
            "n_ref": n_ref,
            "n_dirs": n_dirs,
            "seed": seed,
        },
        sort_keys=True,
    )
    digest = hashlib.sha256(key.encode()).hexdigest()[:16]
    cache_file = cache_dir / f"ref_{model.id}_{digest}.json"
    if cache_file.exists():
        return float(json.loads(cache_file.read_text())["value"])

    X, Y = sample_pair(model, n_ref, n_ref, seed)
    if X.d == 1:
        xs = SortedProjection(X.points[:, 0])
        ys = SortedProjection(Y.points[:, 0])
        from .transport import wasserstein_1d

        value = wasserstein_1d(xs, ys, to)
    else:
        dirs = sample_directions(X.d, n_dirs, seed + 1)
        total = 0.0
        chunk = 8
        for start in range(0, n_dirs, chunk):
            block = dirs.directions[start : start + chunk]
            Xs = np.sort(X.points @ block.T, axis=0)
            Ys = np.sort(Y.points @ block.T, axis=0)
            total += float(np.sum(_trimmed_power_many(Xs, Ys, to)))
        value = (total / n_dirs / (1.0 - 2.0 * to.delta)) ** (1.0 / to.r)

    cache_dir.mkdir(parents=True, exist_ok=True)
    payload = {"value": value, "key": json.loads(key)}
    cache_file.write_text(json.dumps(payload, sort_keys=True))
    return value


def resolve_truth(model: ModelId, n: int, to: TrimOrder,
                  cache_dir: Path | None = None) -> float:
    """Closed form when registered; the m2 pair depends on the sample size."""
    try:
        if model.id == "m2":
            return true_sw_oracle(
                ModelId("m2", {**model.params, "n": n}), to
            )
        return true_sw_oracle(model, to)
    except NoOracle:
        return reference_sw(model, to, cache_dir=cache_dir)


def _coverage_task(args):
    model, size, rep, master_seed, settings, methods, truth = args
    to = TrimOrder(settings.r, settings.delta)
    data_seed = _task_seed(master_seed, model, size, rep, 0)
    dir_seed = _task_seed(master_seed, model, size, rep, 1)
    boot_seed = _task_seed(master_seed, model, size, rep, 2)
    X, Y = sample_pair(model, size, size, data_seed)
    # one-dimensional pairs use the 1-D interval at level alpha directly
    # (every direction is a reflection); the Bonferroni split is for d >= 2
    n_dirs = 1 if X.d == 1 else settings.N
    dirs = sample_directions(X.d, n_dirs, dir_seed)

    out = []

    def record(method, interval, runtime):
        out.append(
            ExperimentRecord(
                model=model.id,
                method=method,
                n=size,
                m=size,
                rep=rep,
                covered=truth in interval,
                length=interval.length,
                runtime_s=runtime,
                lower=interval.lower,
                upper=interval.upper,
                seed=data_seed,
            )
        )

    need_finite = "finite" in methods or "hybrid" in methods
    need_boot = "boot" in methods or "hybrid" in methods

    finite = boot = None
    if need_finite:
        t0 = time.perf_counter()
        finite = ci_sliced(
            X, Y, to, settings.alpha, n_dirs, dir_seed, settings.band, dirs=dirs
        )
        finite_time = time.perf_counter() - t0
        if "finite" in methods:
            record("finite", finite, finite_time)

    pretest_finite = None
    if "hybrid" in methods:
        t0 = time.perf_counter()
        pretest_finite = (
            finite.lower <= 0.0 or min_spacing(X) == 0.0 or min_spacing(Y) == 0.0
        )
        pretest_time = time.perf_counter() - t0

    if need_boot and ("boot" in methods or pretest_finite is False):
        cfg = BootstrapConfig(
            B=settings.B, seed=boot_seed, N=n_dirs, alpha=settings.alpha
        )
        t0 = time.perf_counter()
        boot = bootstrap_ci(X, Y, to, cfg, dirs)
        boot_time = time.perf_counter() - t0
        if "boot" in methods:
            record("boot", boot, boot_time)

    if "hybrid" in methods:
        chosen = finite if pretest_finite else boot
        branch = "finite" if pretest_finite else "bootstrap"
        hybrid = dataclasses.replace(
            chosen,
            method="hybrid",
            params={**chosen.params, "branch": branch},
        )
        runtime = pretest_time + (finite_time if pretest_finite else boot_time)
        record("hybrid", hybrid, runtime)
    return out


def run_simulation(
    models,
    methods,
    sizes,
    reps: int,
    master_seed: int = 0,
    settings: SimSettings = SimSettings(),
    threads: int | None = None,
    cache_dir: Path | None = None,
):
    """Coverage/length/runtime records for every (model, method, size, rep).

    Returns (records, truths) where truths maps (model id, size) to the
    resolved ground-truth distance used for the coverage flags.
    """
    models = [m if isinstance(m, ModelId) else ModelId(m) for m in models]
    methods = list(methods)
    to = TrimOrder(settings.r, settings.delta)
    truths = {
        (model.id, size): resolve_truth(model, size, to, cache_dir=cache_dir)
        for model in models
        for size in sizes
    }
    tasks = [
        (model, size, rep, master_seed, settings, methods,
         truths[(model.id, size)])
        for model in models
        for size in sizes
        for rep in range(reps)
    ]
    workers = resolve_threads(threads)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_coverage_task, tasks, chunksize=1))
    else:
        chunks = [_coverage_task(t) for t in tasks]
    records = [rec for chunk in chunks for rec in chunk]
    method_order = {m: i for i, m in enumerate(["finite", "boot", "hybrid"])}
    model_order = {m.id: i for i, m in enumerate(models)}
    records.sort(
        key=lambda r: (model_order[r.model], r.n, r.rep, method_order.get(r.method, 99))
    )
    return records, truths


def _scaling_task(args):
    model, r, Delta, size, rep, master_seed, alpha, delta, band = args
    to = TrimOrder(r, delta)
    m = ModelId(model, {"Delta": Delta})
    data_seed = _task_seed(master_seed, ModelId(model, {"Delta": Delta, "r": r}),
                           size, rep, 0)
    X, Y = sample_pair(m, size, size, data_seed)
    ci = ci_1d(
        SortedProjection(X.points[:, 0]),
        SortedProjection(Y.points[:, 0]),
        to,
        alpha,
        band,
    )
    return ScalingRecord(
        model=model, r=r, Delta=Delta, n=size, rep=rep,
        lower=ci.lower, upper=ci.upper, length=ci.length, seed=data_seed,
    )


def run_scaling(
    model: str,
    r_values,
    Delta_values,
    sizes,
    reps: int,
    master_seed: int = 0,
    alpha: float = 0.05,
    delta: float = 0.1,
    band: str = "dkw",
    threads: int | None = None,
):
    """Interval lengths across sample sizes for the two rate models; returns
    (records, slopes) with one fitted log-log slope per (r, Delta)."""
    if model not in ("m6i", "m6ii"):
        raise NoOracle(f"the scaling study supports m6i and m6ii, got {model!r}")
    sizes = [int(s) for s in sizes]
    if len(sizes) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    tasks = [
        (model, float(r), float(Delta), size, rep, master_seed, alpha, delta, band)
        for r in r_values
        for Delta in Delta_values
        for size in sizes
        for rep in range(reps)
    ]
    workers = resolve_threads(threads)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_scaling_task, tasks, chunksize=8))
    else:
        records = [_scaling_task(t) for t in tasks]
    records.sort(key=lambda rec: (rec.r, rec.Delta, rec.n, rec.rep))
    return records, fit_length_slopes(records)


def fit_length_slopes(records):
    """Least-squares slope of log(mean length) against log(n) per (r, Delta)."""
    groups: dict[tuple[float, float], dict[int, list[float]]] = {}
    for rec in records:
        groups.setdefault((rec.r, rec.Delta), {}).setdefault(rec.n, []).append(
            rec.length
        )
    slopes = []
    for (r, Delta), by_n in sorted(groups.items()):
        ns = sorted(by_n)
        mean_len = [float(np.mean(by_n[n])) for n in ns]
        slope, intercept = np.polyfit(np.log(ns), np.log(mean_len), 1)
        slopes.append(
            {
                "r": r,
                "Delta": Delta,
                "slope": float(slope),
                "intercept": float(intercept),
                "sizes": ns,
                "mean_lengths": mean_len,
            }
        )
    return slopes
