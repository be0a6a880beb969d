import math

import numpy as np
import pytest

import swinfer as sw


class TestJFunctional:
    def test_uniform_exact(self):
        # int_0^1 u(1-u) du = 1/6
        val = sw.j_functional_1d(sw.uniform_spec(0, 1), sw.TrimOrder(2, 0))
        assert val == pytest.approx(1.0 / 6.0, abs=1e-9)

    def test_gaussian_r2_untrimmed_infinite(self):
        assert sw.j_functional_1d(sw.normal_spec(), sw.TrimOrder(2, 0)) == math.inf

    def test_gaussian_below_r2_finite(self):
        for r in (1.0, 1.5, 1.9):
            val = sw.j_functional_1d(sw.normal_spec(), sw.TrimOrder(r, 0))
            assert math.isfinite(val) and val > 0

    def test_gaussian_trimmed_finite(self):
        val = sw.j_functional_1d(sw.normal_spec(), sw.TrimOrder(2, 0.1))
        assert math.isfinite(val) and val > 0

    def test_split_uniform_gap_infinite(self):
        for delta in (0.0, 0.1, 0.3):
            val = sw.j_functional_1d(sw.split_uniform_spec(0.3, 0.6), sw.TrimOrder(2, delta))
            assert val == math.inf

    def test_split_uniform_no_gap_finite(self):
        val = sw.j_functional_1d(sw.split_uniform_spec(0.5, 0.5), sw.TrimOrder(2, 0))
        assert math.isfinite(val)

    def test_gap_with_r1_is_finite(self):
        # r = 1 involves no division by the density, so an interior hole does
        # not blow the integral up
        val = sw.j_functional_1d(sw.split_uniform_spec(0.3, 0.6), sw.TrimOrder(1, 0))
        assert math.isfinite(val)

    def test_scale_homogeneity(self):
        base = sw.j_functional_1d(sw.uniform_spec(0, 1), sw.TrimOrder(2, 0.05))
        for a in (0.5, 3.0):
            scaled = sw.j_functional_1d(sw.uniform_spec(0, a), sw.TrimOrder(2, 0.05))
            assert scaled == pytest.approx(a**2 * base, rel=1e-6)

    def test_uniform_trimmed_closed_form(self):
        # (1/(1-2d)) * int_{d}^{1-d} u(1-u) du on the quantile scale
        d = 0.1
        exact = (1 / (1 - 2 * d)) * (
            (0.9**2 / 2 - 0.9**3 / 3) - (0.1**2 / 2 - 0.1**3 / 3)
        )
        val = sw.j_functional_1d(sw.uniform_spec(0, 1), sw.TrimOrder(2, d))
        assert val == pytest.approx(exact, abs=1e-9)


class TestSlicedSj:
    def test_d1_matches_j(self):
        dirs = sw.sample_directions(1, 6, seed=0)
        spec = sw.uniform_spec(0, 1)
        val = sw.sliced_sj(lambda theta: spec, sw.TrimOrder(2, 0.05), dirs)
        assert val == pytest.approx(
            sw.j_functional_1d(spec, sw.TrimOrder(2, 0.05)), rel=1e-12
        )

    def test_isotropic_gaussian_r2_trimmed_finite(self):
        dirs = sw.sample_directions(2, 8, seed=1)
        # every projection of N(0, I_2) is N(0, 1)
        val = sw.sliced_sj(lambda theta: sw.normal_spec(), sw.TrimOrder(2, 0.1), dirs)
        assert math.isfinite(val)
        assert val == pytest.approx(
            sw.j_functional_1d(sw.normal_spec(), sw.TrimOrder(2, 0.1)), rel=1e-9
        )

    def test_infinite_direction_propagates(self):
        dirs = sw.sample_directions(1, 4, seed=2)
        specs = [sw.uniform_spec(0, 1), sw.split_uniform_spec(0.3, 0.6)]

        def projspecs(theta):
            return specs[int(theta[0] > 0)]

        assert sw.sliced_sj(projspecs, sw.TrimOrder(2, 0.0), dirs) == math.inf


class TestCrDelta:
    def test_point_mass_zero(self):
        assert sw.c_r_delta(sw.point_mass_spec(3.0), sw.TrimOrder(2, 0.0)) == 0.0

    def test_uniform_beta_integral(self):
        # r=1, delta=0: integral of sqrt(x(1-x)) over [0,1] is pi/8
        val = sw.c_r_delta(sw.uniform_spec(0, 1), sw.TrimOrder(1, 0.0))
        assert val == pytest.approx(math.pi / 8.0, abs=1e-9)

    def test_scaling_r1(self):
        base = sw.c_r_delta(sw.uniform_spec(0, 1), sw.TrimOrder(1, 0.0))
        for a in (2.0, 5.0):
            scaled = sw.c_r_delta(sw.uniform_spec(0, a), sw.TrimOrder(1, 0.0))
            assert scaled == pytest.approx(a * base, rel=1e-8)

    def test_gaussian_finite(self):
        val = sw.c_r_delta(sw.normal_spec(), sw.TrimOrder(2, 0.0))
        assert math.isfinite(val) and val > 0


class TestDistSpecValidation:
    def test_noncallable_rejected(self):
        with pytest.raises(sw.InvalidSpec):
            sw.DistSpec(density=1.0, cdf=lambda x: x, quantile=lambda u: u)

    def test_bad_support_rejected(self):
        with pytest.raises(sw.InvalidSpec):
            sw.DistSpec(
                density=lambda x: x,
                cdf=lambda x: x,
                quantile=lambda u: u,
                support=((1.0, 0.0),),
            )

    def test_decreasing_quantile_rejected(self):
        with pytest.raises(sw.InvalidSpec):
            sw.DistSpec(
                density=lambda x: np.ones_like(x),
                cdf=lambda x: np.clip(x, 0, 1),
                quantile=lambda u: -np.asarray(u, dtype=float),
                support=((0.0, 1.0),),
            )

    def test_uniform_factory_validates(self):
        with pytest.raises(sw.InvalidSpec):
            sw.uniform_spec(1.0, 1.0)
        with pytest.raises(sw.InvalidSpec):
            sw.normal_spec(0.0, 0.0)
        with pytest.raises(sw.InvalidSpec):
            sw.split_uniform_spec(0.7, 0.6)
