"""Finite-sample confidence intervals for the trimmed 1-D and sliced
Wasserstein distances, built from uniform quantile bands.

The envelope functions A(u) <= |F^{-1}(u) - G^{-1}(u)| <= B(u) are piecewise
constant in u: they can only jump where a band function crosses a level i/n
or j/m.  Enumerating those crossings makes the interval integrals exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import bands
from .errors import A1Violated, DimensionMismatch
from .transport import (
    DirectionSet,
    Sample,
    SortedProjection,
    TrimOrder,
    _order_stat_indices,
    sample_directions,
)

__all__ = ["Interval", "Envelope", "check_a1", "envelope_1d", "ci_1d", "ci_sliced"]

FINITE = "finite"
BOOTSTRAP = "bootstrap"
HYBRID = "hybrid"


@dataclass(frozen=True)
class Interval:
    """A confidence interval [lower, upper] with the recipe that produced it."""

    lower: float
    upper: float
    method: str
    level: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (0.0 <= self.lower <= self.upper):
            raise ValueError(
                f"need 0 <= lower <= upper, got [{self.lower}, {self.upper}]"
            )
        if not (0.0 < self.level < 1.0):
            raise ValueError(f"level must lie in (0, 1), got {self.level}")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    @property
    def length(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class Envelope:
    """Piecewise-constant bounds A <= |F^{-1} - G^{-1}| <= B on [delta, 1-delta].

    ``breaks`` has K+1 sorted entries; segment k is (breaks[k], breaks[k+1]]
    with values ``a_values[k]`` and ``b_values[k]``.
    """

    breaks: np.ndarray
    a_values: np.ndarray
    b_values: np.ndarray

    def __post_init__(self):
        if np.any(self.a_values < 0) or np.any(self.a_values > self.b_values):
            raise ValueError("envelope must satisfy 0 <= A(u) <= B(u)")

    def _segment(self, u):
        k = np.searchsorted(self.breaks, u, side="left") - 1
        return np.clip(k, 0, len(self.a_values) - 1)

    def a(self, u):
        return self.a_values[self._segment(u)]

    def b(self, u):
        return self.b_values[self._segment(u)]


def check_a1(delta: float, alpha: float, n: int, m: int, band: str) -> bool:
    """Condition A1(delta; alpha): gamma(delta) > 0 and eta(1-delta) < 1 with
    the band evaluated at sample size min(n, m).

    A relative-VC band with nu >= 1 is vacuous and reported as False.
    """
    try:
        funcs = bands.band_funcs(band, alpha, min(n, m))
    except bands.NuTooLarge:
        return False
    return float(funcs.gamma(delta)) > 0.0 and float(funcs.eta(1.0 - delta)) < 1.0


def _require_a1(to: TrimOrder, alpha: float, n: int, m: int, band: str, override: bool):
    if override or check_a1(to.delta, alpha, n, m, band):
        return
    min_delta = bands.min_delta_for_a1(band, alpha, n, m)
    hint = (
        f"the smallest workable delta is {min_delta:.6g}"
        if min_delta is not None
        else "no delta < 1/2 works at this (alpha, n, m); increase n"
    )
    raise A1Violated(
        f"condition A1 fails for delta={to.delta}, alpha={alpha}, "
        f"n={n}, m={m}, band={band!r}; {hint}",
        min_delta=min_delta,
    )


def _envelope_grid(n: int, m: int, delta: float, funcs_n, funcs_m):
    """Breakpoints of u -> A(u), B(u) on [delta, 1-delta] and the band levels
    at the segment midpoints, as order-statistic index arrays."""
    lo, hi = delta, 1.0 - delta
    pieces = [np.array([lo, hi])]
    for funcs, size in ((funcs_n, n), (funcs_m, m)):
        levels = np.arange(1, size) / size
        pieces.append(np.asarray(funcs.gamma_inv(levels)))
        pieces.append(np.asarray(funcs.eta_inv(levels)))
    bps = np.concatenate(pieces)
    bps = np.unique(np.clip(bps[(bps >= lo) & (bps <= hi)], lo, hi))
    mids = 0.5 * (bps[:-1] + bps[1:])
    ix_g = _order_stat_indices(funcs_n.gamma(mids), n)
    ix_e = _order_stat_indices(funcs_n.eta(mids), n)
    iy_g = _order_stat_indices(funcs_m.gamma(mids), m)
    iy_e = _order_stat_indices(funcs_m.eta(mids), m)
    return bps, np.diff(bps), ix_g, ix_e, iy_g, iy_e


def _envelope_values(Xs, Ys, ix_g, ix_e, iy_g, iy_e):
    """A and B per segment for column-sorted projection matrices."""
    a = np.maximum(Xs[ix_g] - Ys[iy_e], Ys[iy_g] - Xs[ix_e])
    np.maximum(a, 0.0, out=a)
    b = np.maximum(Xs[ix_e] - Ys[iy_g], Ys[iy_e] - Xs[ix_g])
    return a, b


def envelope_1d(
    x: SortedProjection,
    y: SortedProjection,
    to: TrimOrder,
    alpha: float,
    band: str,
    *,
    override: bool = False,
) -> Envelope:
    """Quantile-gap envelope for one pair of projections.

    With ``override=True`` the A1 check is skipped; band arguments outside
    (0, 1] then clamp to the sample extremes, which loses the
    distribution-free length guarantee for unbounded supports.
    """
    n, m = x.source_n, y.source_n
    _require_a1(to, alpha, n, m, band, override)
    funcs_n = bands.band_funcs(band, alpha, n)
    funcs_m = bands.band_funcs(band, alpha, m)
    bps, _, ix_g, ix_e, iy_g, iy_e = _envelope_grid(n, m, to.delta, funcs_n, funcs_m)
    a, b = _envelope_values(x.values, y.values, ix_g, ix_e, iy_g, iy_e)
    return Envelope(breaks=bps, a_values=a, b_values=b)


def _integrate_envelope(w, a, b, to: TrimOrder):
    scale = 1.0 - 2.0 * to.delta
    lower_r = (w @ a**to.r) / scale
    upper_r = (w @ b**to.r) / scale
    return lower_r, upper_r


def ci_1d(
    x: SortedProjection,
    y: SortedProjection,
    to: TrimOrder,
    alpha: float,
    band: str,
    *,
    override: bool = False,
) -> Interval:
    """Finite-sample confidence interval for the trimmed 1-D Wasserstein
    distance, with coverage at least 1 - alpha for every pair (P, Q)."""
    n, m = x.source_n, y.source_n
    _require_a1(to, alpha, n, m, band, override)
    funcs_n = bands.band_funcs(band, alpha, n)
    funcs_m = bands.band_funcs(band, alpha, m)
    _, w, ix_g, ix_e, iy_g, iy_e = _envelope_grid(n, m, to.delta, funcs_n, funcs_m)
    a, b = _envelope_values(x.values, y.values, ix_g, ix_e, iy_g, iy_e)
    lower_r, upper_r = _integrate_envelope(w, a, b, to)
    inv_r = 1.0 / to.r
    return Interval(
        lower=lower_r**inv_r,
        upper=upper_r**inv_r,
        method=FINITE,
        level=1.0 - alpha,
        params={
            "r": to.r,
            "delta": to.delta,
            "alpha": alpha,
            "band": band,
            "n": n,
            "m": m,
            "a1_override": override,
        },
    )


def ci_sliced(
    X: Sample,
    Y: Sample,
    to: TrimOrder,
    alpha: float,
    N: int,
    seed: int,
    band: str,
    *,
    override: bool = False,
    dirs: DirectionSet | None = None,
) -> Interval:
    """Finite-sample confidence interval for the trimmed sliced Wasserstein
    distance via N Monte-Carlo directions and a Bonferroni correction.

    Each direction receives a 1-D interval at level 1 - alpha/N; the
    endpoints are the r-th root of the direction-averaged r-th powers.
    In dimension one the projections all coincide up to reflection, so the
    result is the 1-D interval at level 1 - alpha/N.
    """
    if X.d != Y.d:
        raise DimensionMismatch(f"X.d={X.d} differs from Y.d={Y.d}")
    if N < 1:
        raise DimensionMismatch(f"need N >= 1, got N={N}")
    alpha_dir = alpha / N
    n, m = X.n, Y.n
    _require_a1(to, alpha_dir, n, m, band, override)
    base_params = {
        "r": to.r,
        "delta": to.delta,
        "alpha": alpha,
        "band": band,
        "N": N,
        "alpha_per_direction": alpha_dir,
        "dir_seed": seed,
        "n": n,
        "m": m,
        "a1_override": override,
    }
    if X.d == 1:
        inner = ci_1d(
            SortedProjection(X.points[:, 0]),
            SortedProjection(Y.points[:, 0]),
            to,
            alpha_dir,
            band,
            override=override,
        )
        return Interval(inner.lower, inner.upper, FINITE, 1.0 - alpha, base_params)

    if dirs is None:
        dirs = sample_directions(X.d, N, seed)
    elif dirs.d != X.d or dirs.N != N:
        raise DimensionMismatch("supplied directions disagree with X and N")
    Xs = np.sort(X.points @ dirs.directions.T, axis=0)
    Ys = np.sort(Y.points @ dirs.directions.T, axis=0)
    funcs_n = bands.band_funcs(band, alpha_dir, n)
    funcs_m = bands.band_funcs(band, alpha_dir, m)
    _, w, ix_g, ix_e, iy_g, iy_e = _envelope_grid(n, m, to.delta, funcs_n, funcs_m)
    a, b = _envelope_values(Xs, Ys, ix_g, ix_e, iy_g, iy_e)
    lower_r, upper_r = _integrate_envelope(w, a, b, to)
    inv_r = 1.0 / to.r
    return Interval(
        lower=float(np.mean(lower_r)) ** inv_r,
        upper=float(np.mean(upper_r)) ** inv_r,
        method=FINITE,
        level=1.0 - alpha,
        params=base_params,
    )
