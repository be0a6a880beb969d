"""Bootstrap confidence interval for the r-th power of the sliced distance,
and the hybrid interval that pretests for atoms and for indistinguishability
from zero before trusting the bootstrap.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ._kernels import boot_integrals
from .errors import DimensionMismatch, EmptySample, TooFewPoints
from .intervals import BOOTSTRAP, HYBRID, Interval, ci_sliced
from .transport import (
    DirectionSet,
    Sample,
    TrimOrder,
    _trimmed_power_many,
    sample_directions,
    trim_grid,
)

__all__ = ["BootstrapConfig", "bootstrap_ci", "min_spacing", "hybrid_ci"]


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate count, RNG seed, direction count and level for the bootstrap."""

    B: int = 1000
    seed: int = 0
    N: int | None = None
    alpha: float = 0.05

    def __post_init__(self):
        if self.B < 1:
            raise EmptySample(f"need B >= 1 bootstrap replicates, got {self.B}")
        if not (0.0 < self.alpha < 1.0):
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")


def _empirical_quantile_of(sorted_vals: np.ndarray, p: float) -> float:
    k = min(math.ceil(sorted_vals.size * p), sorted_vals.size)
    return float(sorted_vals[max(k, 1) - 1])


def _resample_counts(cfg: BootstrapConfig, n: int, m: int):
    """Multiplicity vectors for every replicate; replicate b draws from its
    own stream keyed by (seed, b), so results are schedule-independent."""
    CX = np.empty((cfg.B, n), dtype=np.int32)
    CY = np.empty((cfg.B, m), dtype=np.int32)
    for b in range(cfg.B):
        rng = np.random.default_rng((cfg.seed, b))
        CX[b] = np.bincount(rng.integers(0, n, n), minlength=n)
        CY[b] = np.bincount(rng.integers(0, m, m), minlength=m)
    return CX, CY


def bootstrap_ci(
    X: Sample,
    Y: Sample,
    to: TrimOrder,
    cfg: BootstrapConfig,
    dirs: DirectionSet | None = None,
) -> Interval:
    """Basic-bootstrap confidence interval for SW_{r,delta}(P, Q).

    Centers and scales each replicate as s_b = sqrt(nm/(n+m)) * (T*_b - T)
    with T = SW_{r,delta}^r(P_n, Q_m), takes empirical quantiles of {s_b},
    and maps back through the 1/r power; the lower endpoint is clamped at 0.
    The published interval formula indexes the bootstrap CDF at a
    probability, which we read as the empirical quantile of the centered,
    scaled statistic (flagged in params as ``quantile_convention``).
    Directions are drawn once and shared by the original statistic and every
    replicate.
    """
    if X.n < 2 or Y.n < 2:
        raise EmptySample("the bootstrap needs n >= 2 and m >= 2")
    if dirs is None:
        if X.d > 1 and cfg.N is None:
            raise DimensionMismatch("cfg.N is required when no directions are given")
        dirs = sample_directions(X.d, cfg.N or 1, cfg.seed)
    if X.d != Y.d or X.d != dirs.d:
        raise DimensionMismatch(
            f"dimensions disagree: X.d={X.d}, Y.d={Y.d}, dirs.d={dirs.d}"
        )
    n, m = X.n, Y.n
    scale_in = math.sqrt(n * m / (n + m))
    scale_out = 1.0 / scale_in
    trim_scale = 1.0 - 2.0 * to.delta

    if X.d == 1:
        # every direction is +-1 and yields the same 1-D distance, so a single
        # column carries the whole Monte-Carlo average
        Xp = X.points[:, :1]
        Yp = Y.points[:, :1]
    else:
        Xp = X.points @ dirs.directions.T
        Yp = Y.points @ dirs.directions.T
    order_x = np.argsort(Xp, axis=0)
    order_y = np.argsort(Yp, axis=0)
    XsT = np.ascontiguousarray(np.take_along_axis(Xp, order_x, axis=0).T)
    YsT = np.ascontiguousarray(np.take_along_axis(Yp, order_y, axis=0).T)
    w, xpos, ypos = trim_grid(n, m, to.delta)

    T = float(np.mean(_trimmed_power_many(XsT.T, YsT.T, to))) / trim_scale

    CX, CY = _resample_counts(cfg, n, m)
    integrals = boot_integrals(
        XsT, YsT, CX, CY, order_x.T, order_y.T, xpos, ypos, w, to.r
    )
    T_star = integrals.mean(axis=1) / trim_scale
    s = np.sort(scale_in * (T_star - T))
    q_hi = _empirical_quantile_of(s, 1.0 - cfg.alpha / 2.0)
    q_lo = _empirical_quantile_of(s, cfg.alpha / 2.0)
    lower_r = max(0.0, T - q_hi * scale_out)
    upper_r = T + abs(q_lo) * scale_out
    inv_r = 1.0 / to.r
    return Interval(
        lower=lower_r**inv_r,
        upper=upper_r**inv_r,
        method=BOOTSTRAP,
        level=1.0 - cfg.alpha,
        params={
            "r": to.r,
            "delta": to.delta,
            "alpha": cfg.alpha,
            "B": cfg.B,
            "N": dirs.N,
            "boot_seed": cfg.seed,
            "dir_seed": dirs.seed,
            "n": n,
            "m": m,
            "quantile_convention": "empirical quantile of sqrt(nm/(n+m))*(T*-T)",
        },
    )


def min_spacing(s: Sample) -> float:
    """Smallest pairwise Euclidean distance; 0 exactly when two points coincide."""
    if s.n < 2:
        raise TooFewPoints("min_spacing needs at least two points")
    if s.d == 1:
        vals = np.sort(s.points[:, 0])
        return float(np.min(np.diff(vals)))
    dists, _ = cKDTree(s.points).query(s.points, k=2)
    return float(np.min(dists[:, 1]))


def hybrid_ci(
    X: Sample,
    Y: Sample,
    to: TrimOrder,
    alpha: float,
    N: int,
    seed: int,
    band: str,
    cfg: BootstrapConfig,
    *,
    spacing_tol: float = 0.0,
    override: bool = False,
) -> Interval:
    """Pretest interval: the finite-sample interval when 0 is plausible or
    either sample contains (near-)duplicate points, the bootstrap otherwise.

    The returned endpoints are bitwise equal to the chosen sub-interval;
    ``params["branch"]`` records which one fired.  ``spacing_tol`` widens the
    duplicate test for data that went through lossy serialization (exact
    equality, the default, is the documented predicate).
    """
    dirs = sample_directions(X.d, N, seed)
    finite = ci_sliced(
        X, Y, to, alpha, N, seed, band, override=override, dirs=dirs
    )
    use_finite = (
        finite.lower <= 0.0
        or min_spacing(X) <= spacing_tol
        or min_spacing(Y) <= spacing_tol
    )
    if use_finite:
        chosen, branch = finite, "finite"
    else:
        boot_cfg = dataclasses.replace(cfg, alpha=alpha)
        chosen, branch = bootstrap_ci(X, Y, to, boot_cfg, dirs), "bootstrap"
    return Interval(
        lower=chosen.lower,
        upper=chosen.upper,
        method=HYBRID,
        level=1.0 - alpha,
        params={**chosen.params, "branch": branch},
    )
