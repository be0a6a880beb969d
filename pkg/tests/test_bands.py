import math

import numpy as np
import pytest

import swinfer as sw
from swinfer.bands import band_funcs, min_delta_for_a1


class TestDkw:
    def test_beta_exact_point(self):
        spec = sw.BandSpec(sw.DKW, 4.0 * math.exp(-2.0), 100)
        assert sw.beta_dkw(spec) == pytest.approx(0.1, abs=1e-15)

    def test_beta_high_precision(self):
        spec = sw.BandSpec(sw.DKW, 0.05, 1000)
        assert sw.beta_dkw(spec) == pytest.approx(0.046808, abs=1e-6)

    def test_quadrupling_n_halves_beta(self):
        for n in (50, 333, 1024):
            b1 = sw.beta_dkw(sw.BandSpec(sw.DKW, 0.05, n))
            b4 = sw.beta_dkw(sw.BandSpec(sw.DKW, 0.05, 4 * n))
            assert b4 == pytest.approx(b1 / 2.0, rel=1e-12)

    def test_band_values(self):
        spec = sw.BandSpec(sw.DKW, 4.0 * math.exp(-2.0), 100)
        gamma, eta = sw.band_dkw(spec, 0.5)
        assert (gamma, eta) == (pytest.approx(0.4), pytest.approx(0.6))

    def test_band_at_zero(self):
        spec = sw.BandSpec(sw.DKW, 0.1, 50)
        beta = sw.beta_dkw(spec)
        gamma, eta = sw.band_dkw(spec, 0.0)
        assert gamma == -beta and eta == beta

    def test_strictly_positive_beta_for_alpha_near_one(self):
        spec = sw.BandSpec(sw.DKW, 0.999999, 10)
        gamma, eta = sw.band_dkw(spec, 0.3)
        assert gamma < 0.3 < eta

    def test_wrong_family(self):
        with pytest.raises(sw.WrongFamily):
            sw.beta_dkw(sw.BandSpec(sw.RELVC, 0.05, 100))


class TestRelVc:
    def test_nu_value(self):
        assert sw.nu_relvc(sw.BandSpec(sw.RELVC, 0.05, 1000)) == pytest.approx(
            0.46251, abs=1e-5
        )

    def test_nu_formula_identity(self):
        # nu^2 * n / 16 - log(2n+1) must equal log(16/alpha) identically
        for n in (10, 100, 5000):
            for alpha in (0.02, 0.5, 0.99):
                nu = sw.nu_relvc(sw.BandSpec(sw.RELVC, alpha, n))
                assert nu**2 * n / 16.0 - math.log(2 * n + 1) == pytest.approx(
                    math.log(16.0 / alpha), abs=1e-10
                )

    def test_quadrupling_n_decreases_nu(self):
        for n in (8, 20, 100, 10_000):
            nu1 = sw.nu_relvc(sw.BandSpec(sw.RELVC, 0.05, n))
            nu4 = sw.nu_relvc(sw.BandSpec(sw.RELVC, 0.05, 4 * n))
            assert nu4 < nu1

    def test_nu_too_large(self):
        with pytest.raises(sw.NuTooLarge):
            sw.band_relvc(sw.BandSpec(sw.RELVC, 0.05, 10), 0.5)

    def test_gamma_zero_at_zero(self):
        gamma, _ = sw.band_relvc(sw.BandSpec(sw.RELVC, 0.05, 500), 0.0)
        assert gamma == pytest.approx(0.0, abs=1e-15)

    def test_collapses_to_identity_for_huge_n(self):
        spec = sw.BandSpec(sw.RELVC, 0.05, 10**12)
        for u in (0.1, 0.5, 0.9):
            gamma, eta = sw.band_relvc(spec, u)
            assert gamma == pytest.approx(u, abs=1e-4)
            assert eta == pytest.approx(u, abs=1e-4)

    def test_wrong_family(self):
        with pytest.raises(sw.WrongFamily):
            sw.nu_relvc(sw.BandSpec(sw.DKW, 0.05, 100))


@pytest.mark.parametrize("family,n", [(sw.DKW, 47), (sw.DKW, 600), (sw.RELVC, 500), (sw.RELVC, 5000)])
class TestBandShape:
    def test_sandwich_and_monotone_u(self, family, n):
        funcs = band_funcs(family, 0.05, n)
        u = np.linspace(0.0, 1.0, 201)
        gamma, eta = funcs.gamma(u), funcs.eta(u)
        assert np.all(gamma <= u + 1e-12) and np.all(u <= eta + 1e-12)
        assert np.all(np.diff(gamma) > 0) and np.all(np.diff(eta) > 0)

    def test_monotone_alpha(self, family, n):
        u = np.linspace(0.05, 0.95, 37)
        alphas = [0.01, 0.05, 0.1, 0.3]
        gammas = [band_funcs(family, a, n).gamma(u) for a in alphas]
        etas = [band_funcs(family, a, n).eta(u) for a in alphas]
        for g1, g2 in zip(gammas[:-1], gammas[1:]):
            assert np.all(g1 <= g2 + 1e-12)
        for e1, e2 in zip(etas[:-1], etas[1:]):
            assert np.all(e2 <= e1 + 1e-12)

    def test_inverse_roundtrip(self, family, n):
        funcs = band_funcs(family, 0.05, n)
        u = np.linspace(0.05, 0.95, 23)
        assert np.max(np.abs(funcs.gamma_inv(funcs.gamma(u)) - u)) < 1e-10
        assert np.max(np.abs(funcs.eta_inv(funcs.eta(u)) - u)) < 1e-10


class TestRelVcInverseAlgebra:
    def test_bisection_matches_quadratic_inversion(self):
        # solving gamma(u) = t by hand gives u = t + nu*sqrt(t(1-t)); solving
        # eta(u) = t gives u = t - nu*sqrt(t(1+t)); evaluate at attainable t
        funcs = band_funcs(sw.RELVC, 0.05, 800)
        nu = funcs.nu
        u = np.linspace(0.05, 0.95, 18)
        t_g = np.asarray(funcs.gamma(u))
        t_e = np.asarray(funcs.eta(u))
        assert np.max(np.abs(funcs.gamma_inv(t_g) - (t_g + nu * np.sqrt(t_g * (1 - t_g))))) < 1e-10
        assert np.max(np.abs(funcs.eta_inv(t_e) - (t_e - nu * np.sqrt(t_e * (1 + t_e))))) < 1e-10


class TestBandValiditySimulation:
    @pytest.mark.parametrize("family", [sw.DKW, sw.RELVC])
    def test_uniform_quantile_containment(self, family):
        # reduced-size version of the acceptance run: the band must contain
        # the true uniform quantile function on [0.1, 0.9] in at least
        # 1 - alpha/2 of replications (up to binomial noise)
        alpha, n, reps = 0.05, 500, 400
        funcs = band_funcs(family, alpha, n)
        u = np.linspace(0.1, 0.9, 401)
        gamma = np.asarray(funcs.gamma(u))
        eta = np.asarray(funcs.eta(u))
        idx_g = np.clip(np.ceil(gamma * n).astype(int) - 1, 0, n - 1)
        idx_e = np.clip(np.ceil(eta * n).astype(int) - 1, 0, n - 1)
        lo_is_min = gamma <= 0.0
        hi_is_max = eta > 1.0
        rng = np.random.default_rng(2024)
        hits = 0
        for _ in range(reps):
            xs = np.sort(rng.random(n))
            lo = np.where(lo_is_min, xs[0], xs[idx_g])
            hi = np.where(hi_is_max, xs[-1], xs[idx_e])
            hits += bool(np.all(lo <= u) and np.all(u <= hi))
        se = math.sqrt(0.975 * 0.025 / reps)
        assert hits / reps >= 1 - alpha / 2 - 3 * se


class TestMinDeltaForA1:
    def test_dkw_threshold_is_beta(self):
        md = min_delta_for_a1(sw.DKW, 0.05, 100, 400)
        assert md == pytest.approx(sw.beta_dkw(sw.BandSpec(sw.DKW, 0.05, 100)))

    def test_relvc_thresholds(self):
        assert min_delta_for_a1(sw.RELVC, 0.05, 10, 10) is None  # nu >= 1
        md = min_delta_for_a1(sw.RELVC, 0.05, 100000, 100000)
        nu = sw.nu_relvc(sw.BandSpec(sw.RELVC, 0.05, 100000))
        assert md == pytest.approx(nu * math.sqrt(2.0))
        # the threshold is sharp: A1 holds just above, fails just below
        assert sw.check_a1(md * 1.01, 0.05, 100000, 100000, sw.RELVC)
        assert not sw.check_a1(md * 0.99, 0.05, 100000, 100000, sw.RELVC)
