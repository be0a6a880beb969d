"""Samplers and ground-truth oracles for the simulation-study distributions.

Covers the five coverage models, the two rate models with closed-form
distances, uniform torus sampling, the four minimax fixture constructions
with their closed-form sliced distances, and the two-gene toggle-switch
simulator used for likelihood-free inference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.special import gammaln, ndtr, ndtri

from .errors import InvalidParams, NoOracle
from .transport import Sample, TrimOrder

__all__ = [
    "ModelId",
    "PairOracle",
    "MODEL_IDS",
    "sample_pair",
    "sample_torus",
    "true_sw_oracle",
    "lemma_c2_bounds",
    "sample_lemma_c2",
    "toggle_switch",
    "TOGGLE_THETA0",
    "first_coord_abs_moment",
]

MODEL_IDS = (
    "m1", "m2", "m3", "m4", "m5", "m6i", "m6ii",
    "torus", "c1", "c2", "c3", "c4", "toggle",
)

# well-specified toggle-switch parameters (alpha1, alpha2, beta1, beta2, mu, sigma, gamma)
TOGGLE_THETA0 = (22.0, 12.0, 4.0, 4.5, 325.0, 0.25, 0.15)


@dataclass(frozen=True)
class ModelId:
    """A model name from MODEL_IDS plus its parameter record."""

    id: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.id not in MODEL_IDS:
            raise InvalidParams(f"unknown model {self.id!r}; known: {MODEL_IDS}")


@dataclass(frozen=True)
class PairOracle:
    """Ground truth for a model pair: the sliced distance when a closed form
    exists, and whether the J functionals of the two marginals are finite."""

    model: str
    true_sw: float | None = None
    sj_p_finite: bool | None = None
    sj_q_finite: bool | None = None


def _as_model(model) -> ModelId:
    return model if isinstance(model, ModelId) else ModelId(str(model))


def first_coord_abs_moment(d: int, r: float) -> float:
    """t_r^r = E|theta_1|^r for theta uniform on S^(d-1), by quadrature of the
    first-coordinate density (Beta-type); equals 1 when d = 1."""
    if d < 1:
        raise InvalidParams(f"need d >= 1, got {d}")
    if d == 1:
        return 1.0
    log_c = gammaln(d / 2.0) - gammaln((d - 1) / 2.0) - 0.5 * math.log(math.pi)
    c = math.exp(log_c)
    # t = sin(phi) removes the endpoint singularity of (1 - t^2)^{(d-3)/2}
    val, _ = integrate.quad(
        lambda phi: abs(math.sin(phi)) ** r * math.cos(phi) ** (d - 2.0),
        -math.pi / 2.0,
        math.pi / 2.0,
        epsabs=1e-12,
        epsrel=1e-12,
        limit=200,
    )
    return c * val


def _epsilon_n(n: int, k_r: float) -> float:
    if not (0.0 < k_r < 1.0):
        raise InvalidParams(f"k_r must lie in (0, 1), got {k_r}")
    return k_r / math.sqrt(n)


def _torus_points(rng: np.random.Generator, r: float, R: float, n: int) -> np.ndarray:
    """Uniform points on the torus surface by rejection on the poloidal angle
    with envelope proportional to R + r*cos(theta)."""
    ratio = r / R
    out = np.empty((n, 3))
    filled = 0
    while filled < n:
        k = max(2 * (n - filled), 16)
        theta = rng.uniform(0.0, 2.0 * math.pi, k)
        keep = rng.random(k) <= (1.0 + ratio * np.cos(theta)) / (1.0 + ratio)
        theta = theta[keep][: n - filled]
        psi = rng.uniform(0.0, 2.0 * math.pi, theta.size)
        ring = R + r * np.cos(theta)
        out[filled : filled + theta.size, 0] = ring * np.cos(psi)
        out[filled : filled + theta.size, 1] = ring * np.sin(psi)
        out[filled : filled + theta.size, 2] = r * np.sin(theta)
        filled += theta.size
    return out


def sample_torus(r: float, R: float, n: int, seed: int) -> Sample:
    """n uniform points on the torus of tube radius r and center radius R."""
    if not (0.0 < r < R):
        raise InvalidParams(f"need 0 < r < R, got r={r}, R={R}")
    if n < 1:
        raise InvalidParams(f"need n >= 1, got {n}")
    return Sample(_torus_points(np.random.default_rng(seed), r, R, n))


def _gaussian_mixture(rng, n, means, weights):
    means = np.asarray(means, dtype=float)
    comp = rng.choice(len(weights), size=n, p=weights)
    return means[comp] + rng.normal(size=(n, means.shape[1]))


def _m2_weights(n: int) -> tuple[float, float]:
    """P-side atom weights at {2, 4}; the printed weights (1+n^{-1/2})/2 and 1
    do not sum to one and are renormalized proportionally."""
    w = (1.0 + n ** -0.5) / 2.0
    return w / (1.0 + w), 1.0 / (1.0 + w)


def _embed_first_coord(x: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros((x.size, d))
    out[:, 0] = x
    return out


def _construction_marginals(model: ModelId, n: int, m: int, to_r: float):
    """Atom/interval descriptions of the construction pairs, first coordinate."""
    p = model.params
    k_r = p.get("k_r", 0.5)
    variant = p.get("variant", 0)
    if model.id == "c1":
        a, g = p.get("a", 1.0), p.get("g", 1.0)
        if a <= 0 or g <= 0:
            raise InvalidParams(f"c1 needs a > 0 and g > 0, got a={a}, g={g}")
        eps = _epsilon_n(n, k_r) if variant else 0.0
        return (
            ("atoms", ([0.0, a], [0.5 + eps, 0.5 - eps])),
            ("atoms", ([g * a, (1.0 + g) * a], [0.5, 0.5])),
        )
    r = p.get("r", to_r)
    if model.id == "c2":
        s, Delta = p.get("s", 1.0), p.get("Delta", 0.5)
        if s <= 0 or Delta <= 0:
            raise InvalidParams(f"c2 needs s > 0 and Delta > 0, got s={s}, Delta={Delta}")
        c = s ** (1.0 / r)
        eps = _epsilon_n(n, k_r) if variant else 0.0
        if variant:
            pm = ("unif_mix", ([(0.0, c / 2.0), (c / 2.0, c)],
                              [(1.0 + eps) / 2.0, (1.0 - eps) / 2.0]))
        else:
            pm = ("unif_mix", ([(0.0, c)], [1.0]))
        return pm, ("unif_mix", ([(Delta * c, (1.0 + Delta) * c)], [1.0]))
    if model.id in ("c3", "c4"):
        s1, s2 = p.get("s1", 1.0), p.get("s2", 2.0)
        if s1 <= 0 or s2 <= 0:
            raise InvalidParams(f"{model.id} needs s1, s2 > 0")
        if model.id == "c3" and s1 > s2:
            raise InvalidParams("c3 needs s1 <= s2")
        if model.id == "c4" and s2 > s1:
            raise InvalidParams("c4 needs s2 <= s1")
        c1_, c2_ = s1 ** (1.0 / r), s2 ** (1.0 / r)
        pm = ("unif_mix", ([(0.0, c1_)], [1.0]))
        qm = ("unif_mix", ([(0.0, c2_)], [1.0]))
        if variant and model.id == "c3":
            eps = _epsilon_n(m, k_r)
            qm = ("unif_atom", ((0.0, c2_), c2_, eps))
        if variant and model.id == "c4":
            eps = _epsilon_n(n, k_r)
            pm = ("unif_atom", ((0.0, c1_), c1_, eps))
        return pm, qm
    raise InvalidParams(f"{model.id} is not a construction model")


def _sample_marginal(rng, kind, spec, size):
    if kind == "atoms":
        atoms, probs = spec
        return rng.choice(np.asarray(atoms, dtype=float), size=size, p=probs)
    if kind == "unif_mix":
        intervals, probs = spec
        comp = rng.choice(len(intervals), size=size, p=probs)
        u = rng.random(size)
        los = np.array([iv[0] for iv in intervals])
        his = np.array([iv[1] for iv in intervals])
        return los[comp] + u * (his[comp] - los[comp])
    if kind == "unif_atom":
        (lo, hi), atom, eps = spec
        u = rng.random(size)
        vals = lo + rng.random(size) * (hi - lo)
        return np.where(u < eps, atom, vals)
    raise InvalidParams(f"unknown marginal kind {kind!r}")


def sample_pair(model, n: int, m: int, seed: int) -> tuple[Sample, Sample]:
    """i.i.d. samples of sizes n and m from the named pair (P, Q),
    deterministic in the seed."""
    model = _as_model(model)
    if n < 1 or m < 1:
        raise InvalidParams(f"need n, m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    p = model.params

    if model.id == "m1":
        X = _gaussian_mixture(rng, n, [(-1.0, 1.0), (1.0, 1.0)], [0.5, 0.5])
        Y = rng.normal(size=(m, 2))
        return Sample(X), Sample(Y)
    if model.id == "m2":
        p2, _ = _m2_weights(n)
        X = np.where(rng.random(n) < p2, 2.0, 4.0)
        Y = np.where(rng.random(m) < 1.0 / 3.0, 2.0, 5.0)
        return Sample(X), Sample(Y)
    if model.id == "m3":
        return (
            Sample(_torus_points(rng, 0.5, 1.0, n)),
            Sample(_torus_points(rng, 0.5, 5.0, m)),
        )
    if model.id == "m4":
        comp = rng.random(n)
        z = rng.normal(size=n)
        X = np.where(comp < 0.95, z, math.sqrt(0.1) * z)
        Y = rng.normal(size=m)
        return Sample(X), Sample(Y)
    if model.id == "m5":
        means = [(-5.0, -5.0), (5.0, 5.0)]
        X = _gaussian_mixture(rng, n, means, [0.55, 0.45])
        Y = _gaussian_mixture(rng, m, means, [0.5, 0.5])
        return Sample(X), Sample(Y)
    if model.id in ("m6i", "m6ii"):
        Delta = p.get("Delta", 0.0)
        if not (0.0 <= Delta <= 0.5):
            raise InvalidParams(f"m6 needs Delta in [0, 1/2], got {Delta}")
        if model.id == "m6i":
            X = np.where(rng.random(n) < 0.5, -5.0, 5.0)
            Y = np.where(rng.random(m) < 0.5 + Delta, -5.0, 5.0)
            return Sample(X), Sample(Y)
        X = rng.uniform(-5.0, 5.0, n)
        low = rng.random(m) < 0.5 + Delta
        Y = np.where(low, -5.0 + 5.0 * rng.random(m), 5.0 * rng.random(m))
        return Sample(X), Sample(Y)
    if model.id == "torus":
        r1, R1 = p.get("r1", 0.5), p.get("R1", 1.0)
        r2, R2 = p.get("r2", 0.5), p.get("R2", 5.0)
        if not (0.0 < r1 < R1 and 0.0 < r2 < R2):
            raise InvalidParams("torus needs 0 < r < R on both sides")
        return (
            Sample(_torus_points(rng, r1, R1, n)),
            Sample(_torus_points(rng, r2, R2, m)),
        )
    if model.id in ("c1", "c2", "c3", "c4"):
        d = p.get("d", 1)
        (pk, ps), (qk, qs) = _construction_marginals(model, n, m, p.get("r", 2.0))
        X = _sample_marginal(rng, pk, ps, n)
        Y = _sample_marginal(rng, qk, qs, m)
        return Sample(_embed_first_coord(X, d)), Sample(_embed_first_coord(Y, d))
    if model.id == "toggle":
        theta = tuple(p.get("theta", TOGGLE_THETA0))
        T = p.get("T", 300)
        X = toggle_switch(theta, n, T, seed=int(rng.integers(2**63)))
        Y = toggle_switch(theta, m, T, seed=int(rng.integers(2**63)))
        return X, Y
    raise InvalidParams(f"unknown model {model.id!r}")


def _discrete_pair_power(atoms_p, probs_p, atoms_q, probs_q, r, delta) -> float:
    """Exact trimmed integral of |F^{-1}-G^{-1}|^r for two discrete laws."""
    ap = np.sort(np.asarray(atoms_p, dtype=float))
    aq = np.sort(np.asarray(atoms_q, dtype=float))
    op = np.argsort(np.asarray(atoms_p, dtype=float))
    oq = np.argsort(np.asarray(atoms_q, dtype=float))
    cp = np.cumsum(np.asarray(probs_p, dtype=float)[op])
    cq = np.cumsum(np.asarray(probs_q, dtype=float)[oq])
    lo, hi = delta, 1.0 - delta
    cuts = np.unique(np.concatenate([[lo, hi], cp[:-1], cq[:-1]]))
    cuts = cuts[(cuts >= lo) & (cuts <= hi)]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        x = ap[np.searchsorted(cp, mid, side="left")]
        y = aq[np.searchsorted(cq, mid, side="left")]
        total += (b - a) * abs(x - y) ** r
    return total / (1.0 - 2.0 * delta)


def _abs_linear_power_integral(a: float, b: float, r: float, lo: float, hi: float) -> float:
    """int_lo^hi |a + b u|^r du, exactly."""
    if hi <= lo:
        return 0.0
    if b == 0.0:
        return abs(a) ** r * (hi - lo)

    def anti(u):
        v = a + b * u
        return math.copysign(abs(v) ** (r + 1.0), v) / (b * (r + 1.0))

    root = -a / b
    if lo < root < hi:
        return anti(root) - anti(lo) + anti(hi) - anti(root)
    return anti(hi) - anti(lo)


def _m6ii_power(Delta: float, r: float, delta: float) -> float:
    """Exact trimmed integral for the uniform-mixture pair of the rate study."""
    w = 0.5 + Delta
    # gap(u) = F^{-1}(u) - G^{-1}(u), piecewise linear with a kink at w
    # F^{-1}(u) = -5 + 10u; G^{-1}(u) = -5 + 5u/w for u <= w, 5(u-w)/(1-w) else
    lo, hi = delta, 1.0 - delta
    total = 0.0
    # piece 1: a + b*u with a = 0, b = 10 - 5/w on [lo, min(w, hi)]
    total += _abs_linear_power_integral(0.0, 10.0 - 5.0 / w, r, lo, min(w, hi))
    # piece 2: (-5 + 5w/(1-w)) + (10 - 5/(1-w)) u on [max(w, lo), hi]
    a2 = -5.0 + 5.0 * w / (1.0 - w)
    b2 = 10.0 - 5.0 / (1.0 - w)
    total += _abs_linear_power_integral(a2, b2, r, max(w, lo), hi)
    return total / (1.0 - 2.0 * delta)


def true_sw_oracle(model, to: TrimOrder) -> float:
    """Closed-form trimmed sliced Wasserstein distance of the model pair.

    Raises NoOracle for models whose distance is only available by
    simulation (m1, m3, m4, m5, torus, toggle).
    """
    model = _as_model(model)
    p = model.params
    r, delta = to.r, to.delta

    if model.id == "m2":
        n = p.get("n")
        if n is None:
            raise NoOracle("the m2 pair depends on n; pass params={'n': ...}")
        p2, p4 = _m2_weights(int(n))
        power = _discrete_pair_power([2.0, 4.0], [p2, p4], [2.0, 5.0],
                                     [1.0 / 3.0, 2.0 / 3.0], r, delta)
        return power ** (1.0 / r)
    if model.id == "m6i":
        Delta = p.get("Delta", 0.0)
        power = _discrete_pair_power([-5.0, 5.0], [0.5, 0.5], [-5.0, 5.0],
                                     [0.5 + Delta, 0.5 - Delta], r, delta)
        return power ** (1.0 / r)
    if model.id == "m6ii":
        Delta = p.get("Delta", 0.0)
        if Delta == 0.0:
            return 0.0
        return _m6ii_power(Delta, r, delta) ** (1.0 / r)
    if model.id in ("c1", "c2", "c3", "c4"):
        if p.get("variant", 0) != 0:
            raise NoOracle("closed forms are registered for the base pairs only")
        d = p.get("d", 1)
        if model.id == "c1":
            a, g = p.get("a", 1.0), p.get("g", 1.0)
            # the projected quantile gap is g*a*|theta_1| at every u, so the
            # trimmed distance is Gamma = g * a * t_r for every delta
            return g * a * first_coord_abs_moment(d, r) ** (1.0 / r)
        shape_r = p.get("r", r)
        if shape_r != r:
            raise NoOracle(
                f"{model.id} was parameterized with r={shape_r}; its closed form "
                f"only applies at that order"
            )
        tr_r = first_coord_abs_moment(d, r)
        if model.id == "c2":
            s, Delta = p.get("s", 1.0), p.get("Delta", 0.5)
            # constant projected gap Delta * s^{1/r} * |theta_1|
            return Delta * s ** (1.0 / r) * tr_r ** (1.0 / r)
        s1, s2 = p.get("s1", 1.0), p.get("s2", 2.0)
        if delta != 0.0:
            raise NoOracle(f"{model.id} closed form is registered at delta = 0 only")
        gap = abs(s1 ** (1.0 / r) - s2 ** (1.0 / r))
        return (tr_r * gap**r / (r + 1.0)) ** (1.0 / r)
    raise NoOracle(f"no closed form registered for model {model.id!r}")


def pair_oracle(model, to: TrimOrder) -> PairOracle:
    model = _as_model(model)
    try:
        sw = true_sw_oracle(model, to)
    except NoOracle:
        sw = None
    sj = {
        "m6i": (False, False),   # atoms: J infinite
        "m6ii": (True, True),    # bounded densities on intervals
        "m1": (True, True),      # Gaussian mixtures, delta > 0
        "m2": (False, False),
    }.get(model.id, (None, None))
    return PairOracle(model=model.id, true_sw=sw, sj_p_finite=sj[0], sj_q_finite=sj[1])


def lemma_c2_bounds(case: int, params: dict) -> float:
    """Closed-form lower bounds on the r-th power of the distance between the
    two fixture pairs; used as floors for empirical distances."""
    r = params.get("r", 2.0)
    if r < 1.0:
        raise InvalidParams(f"need r >= 1, got {r}")
    if case == 1:
        Delta, eps = params["Delta"], params["eps"]
        if not (Delta >= eps > 0.0):
            raise InvalidParams(f"case 1 needs Delta >= eps > 0, got {Delta}, {eps}")
        return Delta**r + 0.25 * r * eps * Delta ** (r - 1.0)
    if case == 2:
        xi, eps = params["xi"], params["eps"]
        if not (0.0 < xi <= 1.0 and 0.0 < eps <= 1.0):
            raise InvalidParams(f"case 2 needs xi, eps in (0, 1], got {xi}, {eps}")
        dxi = abs(xi - 1.0)
        return (dxi**r + r * eps * dxi ** (r - 1.0)) / (r + 1.0)
    raise InvalidParams(f"case must be 1 or 2, got {case}")


def sample_lemma_c2(case: int, params: dict, n: int, seed: int) -> tuple[Sample, Sample]:
    """Samples from the (nu, rho) fixture pairs behind lemma_c2_bounds."""
    rng = np.random.default_rng(seed)
    if case == 1:
        Delta, eps = params["Delta"], params["eps"]
        left = rng.random(n) < (1.0 + eps) / 2.0
        u = rng.random(n)
        nu = np.where(left, 0.5 * u, 0.5 + 0.5 * u)
        rho = Delta + rng.random(n)
        return Sample(nu), Sample(rho)
    if case == 2:
        xi, eps = params["xi"], params["eps"]
        nu = xi * rng.random(n)
        atom = rng.random(n) < eps
        rho = np.where(atom, 1.0, rng.random(n))
        return Sample(nu), Sample(rho)
    raise InvalidParams(f"case must be 1 or 2, got {case}")


def _truncated_std_normal(rng: np.random.Generator, lower: np.ndarray) -> np.ndarray:
    """One draw per entry from N(0,1) conditioned on being >= lower, via the
    inverse CDF of the upper tail (stable for far-right truncation points)."""
    u = rng.random(lower.shape)
    tail = ndtr(-lower)
    return -ndtri((1.0 - u) * tail)


def toggle_switch(theta, n: int, T: int = 300, seed: int = 0) -> Sample:
    """Observed expression levels of the two-gene toggle-switch system.

    Simulates the coupled recursion for T steps from (U_0, V_0) = (10, 10)
    with half-Gaussian-step noise truncated from below so the states stay
    nonnegative, then adds observation noise N(mu, (mu*sigma/U_T^gamma)^2);
    the second observation parameter is a standard deviation.
    """
    a1, a2, b1, b2, mu, sigma, gamma = (float(v) for v in theta)
    if b1 < 0 or b2 < 0 or sigma < 0 or gamma < 0:
        raise InvalidParams("beta1, beta2, sigma and gamma must be nonnegative")
    if n < 1 or T < 1:
        raise InvalidParams(f"need n >= 1 and T >= 1, got n={n}, T={T}")
    rng = np.random.default_rng(seed)
    U = np.full(n, 10.0)
    V = np.full(n, 10.0)
    for _ in range(T):
        drift_u = U + a1 / (1.0 + V**b1) - (1.0 + 0.03 * U)
        drift_v = V + a2 / (1.0 + U**b2) - (1.0 + 0.03 * V)
        xi = _truncated_std_normal(rng, -2.0 * drift_u)
        zeta = _truncated_std_normal(rng, -2.0 * drift_v)
        U = drift_u + 0.5 * xi
        V = drift_v + 0.5 * zeta
    # numerical guard: U_T = 0 has probability zero but would blow up the SD
    sd = mu * sigma / np.maximum(U, 1e-12) ** gamma
    return Sample(U + mu + sd * rng.normal(size=n))
