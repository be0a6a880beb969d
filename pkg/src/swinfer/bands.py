"""Uniform quantile-band functions for the DKW and relative-VC inequalities.

A band is a pair (gamma, eta) such that, with probability at least
1 - alpha/2 simultaneously over u, the true quantile F^{-1}(u) lies between
the empirical quantiles F_n^{-1}(gamma(u)) and F_n^{-1}(eta(u)).  The band
functions may leave [0, 1]; callers enforce condition A1 where needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NuTooLarge, WrongFamily

__all__ = [
    "DKW",
    "RELVC",
    "BandSpec",
    "beta_dkw",
    "band_dkw",
    "nu_relvc",
    "band_relvc",
    "min_delta_for_a1",
]

DKW = "dkw"
RELVC = "relvc"


@dataclass(frozen=True)
class BandSpec:
    """Band family, two-sided level alpha and sample size n."""

    family: str
    alpha: float
    n: int

    def __post_init__(self):
        if self.family not in (DKW, RELVC):
            raise WrongFamily(f"unknown band family {self.family!r}")
        if not (0.0 < self.alpha < 1.0):
            raise WrongFamily(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.n < 1:
            raise WrongFamily(f"n must be >= 1, got {self.n}")


def beta_dkw(spec: BandSpec) -> float:
    """Half-width sqrt(log(4/alpha) / (2n)) of the DKW band in probability scale."""
    if spec.family != DKW:
        raise WrongFamily(f"beta_dkw needs a DKW spec, got {spec.family!r}")
    return math.sqrt(math.log(4.0 / spec.alpha) / (2.0 * spec.n))


def band_dkw(spec: BandSpec, u: float) -> tuple[float, float]:
    """DKW band (gamma, eta) = (u - beta, u + beta)."""
    beta = beta_dkw(spec)
    return u - beta, u + beta


def nu_relvc(spec: BandSpec) -> float:
    """Relative-VC constant sqrt((16/n) * [log(16/alpha) + log(2n+1)])."""
    if spec.family != RELVC:
        raise WrongFamily(f"nu_relvc needs a RelVC spec, got {spec.family!r}")
    return math.sqrt(
        16.0 / spec.n * (math.log(16.0 / spec.alpha) + math.log(2.0 * spec.n + 1.0))
    )


def _relvc_gamma(nu: float, u):
    u = np.asarray(u, dtype=float)
    return (2.0 * u + nu**2 - nu * np.sqrt(nu**2 + 4.0 * u * (1.0 - u))) / (
        2.0 * (1.0 + nu**2)
    )


def _relvc_eta(nu: float, u):
    # the 4u(1+u) term is asymmetric with gamma's 4u(1-u); both follow the
    # quadratic inversion of the relative-VC inequality
    u = np.asarray(u, dtype=float)
    return (2.0 * u + nu**2 + nu * np.sqrt(nu**2 + 4.0 * u * (1.0 + u))) / (
        2.0 * (1.0 - nu**2)
    )


def band_relvc(spec: BandSpec, u: float) -> tuple[float, float]:
    """Relative-VC band (gamma, eta); requires nu < 1 for eta's denominator."""
    nu = nu_relvc(spec)
    if nu >= 1.0:
        raise NuTooLarge(
            f"nu(alpha={spec.alpha}, n={spec.n}) = {nu:.4f} >= 1: "
            "the band is vacuous, increase n or alpha"
        )
    return float(_relvc_gamma(nu, u)), float(_relvc_eta(nu, u))


class _BandFuncs:
    """Vectorized gamma/eta and their inverses, used by the interval module.

    Inverses solve gamma(u) = t and eta(u) = t; for a piecewise-constant
    empirical quantile these are the only points where u -> F_n^{-1}(band(u))
    can jump, so they are the exact integration breakpoints.
    """

    def gamma(self, u):
        raise NotImplementedError

    def eta(self, u):
        raise NotImplementedError

    def gamma_inv(self, t):
        raise NotImplementedError

    def eta_inv(self, t):
        raise NotImplementedError


class _DkwFuncs(_BandFuncs):
    def __init__(self, alpha: float, n: int):
        self.beta = beta_dkw(BandSpec(DKW, alpha, n))

    def gamma(self, u):
        return np.asarray(u, dtype=float) - self.beta

    def eta(self, u):
        return np.asarray(u, dtype=float) + self.beta

    def gamma_inv(self, t):
        return np.asarray(t, dtype=float) + self.beta

    def eta_inv(self, t):
        return np.asarray(t, dtype=float) - self.beta


def _bisect_increasing(f, targets: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Vectorized bisection for an increasing f, to absolute tolerance 1e-12."""
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = f(mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.max(hi - lo) < 1e-12:
            break
    return 0.5 * (lo + hi)


class _RelVcFuncs(_BandFuncs):
    def __init__(self, alpha: float, n: int):
        nu = nu_relvc(BandSpec(RELVC, alpha, n))
        if nu >= 1.0:
            raise NuTooLarge(
                f"nu(alpha={alpha}, n={n}) = {nu:.4f} >= 1: "
                "the band is vacuous, increase n or alpha"
            )
        self.nu = nu

    def gamma(self, u):
        return _relvc_gamma(self.nu, u)

    def eta(self, u):
        return _relvc_eta(self.nu, u)

    def gamma_inv(self, t):
        # gamma is increasing with gamma(u) <= u, so the root lies in [t, 1]
        t = np.asarray(t, dtype=float)
        return _bisect_increasing(
            self.gamma, t, np.maximum(t, 0.0), np.ones_like(t)
        )

    def eta_inv(self, t):
        # eta is increasing with eta(u) >= u, so the root lies in [0, min(t, 1)]
        t = np.asarray(t, dtype=float)
        return _bisect_increasing(
            self.eta, t, np.zeros_like(t), np.minimum(np.maximum(t, 0.0), 1.0)
        )


class _IdentityFuncs(_BandFuncs):
    """Degenerate band gamma = eta = id; collapses the interval to the plug-in
    estimate and exercises the integration path in tests."""

    def gamma(self, u):
        return np.asarray(u, dtype=float)

    eta = gamma
    gamma_inv = gamma
    eta_inv = gamma


def band_funcs(family: str, alpha: float, n: int) -> _BandFuncs:
    if family == DKW:
        return _DkwFuncs(alpha, n)
    if family == RELVC:
        return _RelVcFuncs(alpha, n)
    if family == "identity":
        return _IdentityFuncs()
    raise WrongFamily(f"unknown band family {family!r}")


def min_delta_for_a1(family: str, alpha: float, n: int, m: int) -> float | None:
    """Infimum of trimming constants satisfying condition A1 at (alpha, n, m),
    or None when no delta < 1/2 works."""
    k = min(n, m)
    if family == DKW:
        beta = beta_dkw(BandSpec(DKW, alpha, k))
        return beta if beta < 0.5 else None
    if family == RELVC:
        nu = nu_relvc(BandSpec(RELVC, alpha, k))
        if nu >= 1.0:
            return None
        # gamma(delta) > 0 holds for every delta > 0; eta(1-delta) < 1 needs
        # delta > nu * sqrt(2)
        bound = nu * math.sqrt(2.0)
        return bound if bound < 0.5 else None
    if family == "identity":
        return 0.0
    raise WrongFamily(f"unknown band family {family!r}")
