"""Likelihood-free confidence sets for simulator parameters.

A parameter is accepted when the lower confidence bound on the sliced
distance between the observed sample and a synthetic sample from that
parameter does not exceed the tolerance; the resulting set covers the
distance-projection parameter with the nominal frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidParams, SimulatorFailure
from .intervals import Interval, ci_sliced
from .models import toggle_switch
from .transport import Sample, TrimOrder, sliced_wasserstein, sample_directions

__all__ = [
    "ParamGrid",
    "LfiResult",
    "lfi_confidence_set",
    "sw_projection_estimate",
    "toggle_simulator",
]

Simulator = Callable[[np.ndarray, int, int], np.ndarray]


@dataclass(frozen=True)
class ParamGrid:
    """Candidate parameter vectors, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            raise InvalidParams("the parameter grid must be nonempty")
        object.__setattr__(self, "points", pts)

    @property
    def M(self) -> int:
        return self.points.shape[0]

    @property
    def D(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class LfiResult:
    """Per-parameter intervals, the acceptance threshold and the accepted set."""

    grid: ParamGrid
    lower: np.ndarray
    upper: np.ndarray
    epsilon: float
    point_estimate: np.ndarray | None = None

    @property
    def accepted_mask(self) -> np.ndarray:
        return self.lower <= self.epsilon

    @property
    def accepted(self) -> np.ndarray:
        return self.grid.points[self.accepted_mask]


def toggle_simulator(theta: np.ndarray, m: int, seed: int) -> np.ndarray:
    """Built-in simulator adapter for the toggle-switch model; theta is the
    full 7-vector (alpha1, alpha2, beta1, beta2, mu, sigma, gamma)."""
    return toggle_switch(tuple(np.asarray(theta, dtype=float)), m, seed=seed).points


def _simulate(simulator: Simulator, theta: np.ndarray, m: int, seed: int,
              expect_d: int) -> Sample:
    try:
        pts = np.asarray(simulator(theta, m, seed), dtype=float)
    except Exception as exc:  # noqa: BLE001 - adapter contract
        raise SimulatorFailure(f"simulator raised for theta={theta!r}: {exc}") from exc
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] != m or pts.shape[1] != expect_d:
        raise SimulatorFailure(
            f"simulator returned shape {pts.shape}, expected ({m}, {expect_d})"
        )
    if not np.all(np.isfinite(pts)):
        raise SimulatorFailure(f"simulator returned non-finite values for theta={theta!r}")
    return Sample(pts)


def lfi_confidence_set(
    observed: Sample,
    simulator: Simulator,
    grid: ParamGrid,
    m: int,
    eps: float,
    to: TrimOrder,
    alpha: float,
    N: int,
    seed: int,
    band: str,
    *,
    override: bool = False,
) -> LfiResult:
    """Confidence set {theta : lower bound on SW(P, P_theta) <= eps}.

    Each grid point gets one fresh synthetic sample of size m, seeded from
    (seed, grid index), and a sliced interval at level 1 - alpha; eps = 0 is
    the well-specified reading.
    """
    if eps < 0.0:
        raise InvalidParams(f"eps must be >= 0, got {eps}")
    if m < 1:
        raise InvalidParams(f"need m >= 1, got {m}")
    lower = np.empty(grid.M)
    upper = np.empty(grid.M)
    dir_seed = int(np.random.default_rng((seed, 0x5D)).integers(2**63))
    for idx in range(grid.M):
        sim_seed = int(np.random.default_rng((seed, idx)).integers(2**63))
        synth = _simulate(simulator, grid.points[idx], m, sim_seed, observed.d)
        ci = ci_sliced(observed, synth, to, alpha, N, dir_seed, band,
                       override=override)
        lower[idx], upper[idx] = ci.lower, ci.upper
    return LfiResult(grid=grid, lower=lower, upper=upper, epsilon=float(eps))


def sw_projection_estimate(
    observed: Sample,
    simulator: Simulator,
    grid: ParamGrid,
    M_sim: int,
    to: TrimOrder,
    seed: int,
    *,
    N: int = 100,
) -> np.ndarray:
    """Grid point minimizing the plug-in sliced distance to the observed
    sample, using M_sim synthetic draws per candidate; ties break toward the
    first grid index."""
    if M_sim < 1:
        raise InvalidParams(f"need M_sim >= 1, got {M_sim}")
    dirs = sample_directions(observed.d, N,
                             int(np.random.default_rng((seed, 0x5D)).integers(2**63)))
    best_idx, best_val = 0, np.inf
    for idx in range(grid.M):
        sim_seed = int(np.random.default_rng((seed, idx)).integers(2**63))
        synth = _simulate(simulator, grid.points[idx], M_sim, sim_seed, observed.d)
        val = sliced_wasserstein(observed, synth, to, dirs)
        if val < best_val:
            best_idx, best_val = idx, val
    return grid.points[best_idx]
