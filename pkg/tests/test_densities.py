"""Closed-form densities against scipy.stats and numerical integration."""
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats
from scipy.spatial.transform import Rotation

from student_levy.densities import (
    MixtureDensity,
    StudentParams,
    SubordinatorParams,
    gaussian_semigroup_pdf,
    inv_gamma_logpdf,
    inv_gamma_pdf,
    mixture_pdf,
    student_logpdf,
    student_pdf,
)
from student_levy.exactpoly import BesselMixture, ProductSpec, expand_product
from student_levy.specfun import student_norm_const


def t_oracle(nu, x):
    """f_nu is Student's t with 2 nu degrees of freedom scaled by 1/sqrt(2 nu)."""
    s = 1 / math.sqrt(2 * nu)
    return stats.t.pdf(x, df=2 * nu, scale=s)


class TestStudent:
    def test_examples(self):
        assert student_pdf(StudentParams(0.5), 0.0) == pytest.approx(1 / math.pi, rel=1e-15)
        assert student_pdf(StudentParams(1.5), 1.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)
        assert student_pdf(StudentParams(1.0, 2), np.zeros(2)) == pytest.approx(1 / math.pi, rel=1e-15)

    @pytest.mark.parametrize("nu", [0.3, 0.5, 1.0, 2.5, 7.0])
    def test_matches_scipy_t(self, nu):
        x = np.linspace(-30, 30, 121)
        np.testing.assert_allclose(student_pdf(StudentParams(nu), x), t_oracle(nu, x), rtol=1e-12)

    @pytest.mark.parametrize("nu", [0.5, 1.5, 3.0])
    def test_normalised_1d(self, nu):
        p = StudentParams(nu)
        val, err = integrate.quad(lambda x: student_pdf(p, x), -np.inf, np.inf, epsabs=1e-13, epsrel=1e-12)
        assert val == pytest.approx(1.0, abs=1e-8)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 2.0])
    def test_normalised_2d_radial(self, nu):
        p = StudentParams(nu, 2)
        val, _ = integrate.quad(lambda r: 2 * math.pi * r * student_pdf(p, np.array([r, 0.0])),
                                0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_rotation_invariance(self):
        p = StudentParams(1.7, 3)
        rng = np.random.default_rng(3)
        x = rng.normal(size=(50, 3)) * 4
        R = Rotation.random(5, random_state=4).as_matrix()
        base = student_pdf(p, x)
        for m in R:
            np.testing.assert_allclose(student_pdf(p, x @ m.T), base, rtol=1e-14)

    def test_identity_scale_equals_spherical(self):
        x = np.array([[0.3, -1.2], [4.0, 2.0]])
        a = student_pdf(StudentParams(2.0, 2, np.eye(2)), x)
        b = student_pdf(StudentParams(2.0, 2), x)
        np.testing.assert_array_equal(a, b)

    def test_correlated_normalisation(self):
        """|K|^(-1/2) makes the correlated density integrate to one."""
        K = np.array([[2.0, 0.6], [0.6, 1.0]])
        p = StudentParams(1.5, 2, K)
        val, _ = integrate.dblquad(lambda y, x: student_pdf(p, np.array([x, y])),
                                   -400, 400, -400, 400, epsabs=1e-10)
        tail = 2 * math.pi * math.sqrt(np.linalg.det(K)) * student_norm_const(1.5, 2) * 400.0 ** -3 / 3
        assert val == pytest.approx(1.0, abs=2e-4 + tail)

    def test_diagonal_scale_factorises(self):
        p = StudentParams(2.5, 2, np.diag([1.0, 4.0]))
        x = np.array([[1.0, 2.0], [-3.0, 0.5]])
        expect = 0.5 * student_pdf(StudentParams(2.5, 2), x / np.array([1.0, 2.0]))
        np.testing.assert_allclose(student_pdf(p, x), expect, rtol=1e-14)

    def test_log_space_far_tail(self):
        lp = student_logpdf(StudentParams(4.0, 3), np.array([1e150, 0, 0]))
        assert np.isfinite(lp) and lp < -1000

    @pytest.mark.parametrize("scale", [np.eye(3), np.array([[1.0, 2.0], [2.0, 1.0]]),
                                       np.array([[1.0, 0.1], [0.0, 1.0]])])
    def test_invalid_scale(self, scale):
        with pytest.raises(ValueError):
            StudentParams(1.0, 2, scale)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            student_pdf(StudentParams(1.0, 2), np.zeros(3))

    def test_invalid_params(self):
        with pytest.raises(ValueError):
            StudentParams(0.0)
        with pytest.raises(ValueError):
            StudentParams(1.0, 0)


class TestInverseGamma:
    def test_examples(self):
        assert inv_gamma_pdf(SubordinatorParams(1.0), 1.0) == pytest.approx(0.25 * math.exp(-0.25), rel=1e-15)
        assert inv_gamma_pdf(SubordinatorParams(2.0), 1.0) == pytest.approx(math.exp(-0.25) / 16, rel=1e-15)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 3.3])
    def test_matches_scipy(self, nu):
        t = np.geomspace(1e-3, 1e4, 80)
        ref = stats.invgamma.pdf(t, a=nu, scale=0.25)
        np.testing.assert_allclose(inv_gamma_pdf(SubordinatorParams(nu), t), ref, rtol=1e-12)

    def test_mode(self):
        p = SubordinatorParams(2.0)
        m = 1 / 12
        h = 1e-6
        assert inv_gamma_pdf(p, m) > inv_gamma_pdf(p, m - h)
        assert inv_gamma_pdf(p, m) > inv_gamma_pdf(p, m + h)

    def test_tail(self):
        p = SubordinatorParams(0.5)
        t = 1e8
        assert inv_gamma_pdf(p, t) * t**1.5 == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-8)

    @pytest.mark.parametrize("nu", [0.5, 2.0])
    def test_normalised(self, nu):
        p = SubordinatorParams(nu)
        val, _ = integrate.quad(lambda t: inv_gamma_pdf(p, t), 0, np.inf, epsabs=1e-13, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_domain(self):
        with pytest.raises(ValueError):
            inv_gamma_pdf(SubordinatorParams(1.0), 0.0)
        with pytest.raises(ValueError):
            inv_gamma_logpdf(SubordinatorParams(1.0), np.array([1.0, -1.0]))


class TestGaussianSemigroup:
    def test_examples(self):
        assert gaussian_semigroup_pdf(0.5, 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-15)
        assert gaussian_semigroup_pdf(1.0, np.zeros(2), d=2) == pytest.approx(1 / (4 * math.pi), rel=1e-15)
        assert gaussian_semigroup_pdf(1.0, 2.0) == pytest.approx(math.exp(-1) / math.sqrt(4 * math.pi), rel=1e-15)

    def test_variance_two_t(self):
        x = np.linspace(-10, 10, 41)
        np.testing.assert_allclose(gaussian_semigroup_pdf(1.7, x), stats.norm.pdf(x, scale=math.sqrt(3.4)),
                                   rtol=1e-13)

    def test_domain(self):
        with pytest.raises(ValueError):
            gaussian_semigroup_pdf(0.0, 1.0)

    @pytest.mark.parametrize("nu,d", [(0.5, 1), (1.5, 1), (1.0, 2), (2.5, 2)])
    @pytest.mark.parametrize("r", [0.0, 0.7, 3.0, 20.0])
    def test_subordination_identity(self, nu, d, r):
        """Integrating g_t(x) against h_nu(t) recovers f_nu(x)."""
        x = np.zeros(d)
        x[0] = r
        hp = SubordinatorParams(nu)

        def integrand(y):
            t = math.exp(y)
            return gaussian_semigroup_pdf(t, x if d > 1 else r, d) * inv_gamma_pdf(hp, t) * t

        val, _ = integrate.quad(integrand, -12, 40, epsabs=0, epsrel=1e-12, limit=400)
        target = student_pdf(StudentParams(nu, d), x if d > 1 else r)
        assert val == pytest.approx(target, rel=1e-8)


class TestMixtureDensity:
    def test_pure_cauchy(self):
        m = MixtureDensity(BesselMixture({0: 1}))
        assert mixture_pdf(m, 0.0) == pytest.approx(1 / math.pi, rel=1e-15)

    def test_two_step_walk_at_zero(self):
        m = MixtureDensity(BesselMixture({1: Fraction(1, 4), 2: Fraction(3, 4)}), scale=2.0)
        expect = 0.5 * (0.25 * student_norm_const(1.5) + 0.75 * student_norm_const(2.5))
        assert mixture_pdf(m, 0.0) == pytest.approx(expect, rel=1e-15)

    def test_tail(self):
        mix = expand_product(ProductSpec.equal(1, 3))
        m = MixtureDensity(mix, scale=1.0)
        x = 1e5
        expect = float(mix.weights[1]) * student_norm_const(1.5) * x**-4
        assert mixture_pdf(m, x) == pytest.approx(expect, rel=1e-6)

    @settings(max_examples=15, deadline=None)
    @given(st.lists(st.integers(1, 9), min_size=1, max_size=3), st.floats(0.3, 3.0))
    def test_normalised(self, raw, scale):
        total = sum(raw)
        spec = ProductSpec(tuple(range(len(raw))), tuple(Fraction(r, total) for r in raw))
        m = MixtureDensity(expand_product(spec), scale=scale)
        val, _ = integrate.quad(lambda x: mixture_pdf(m, x), -np.inf, np.inf, epsabs=1e-12, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_radial_2d_normalised(self):
        m = MixtureDensity(expand_product(ProductSpec.equal(1, 2)), scale=2.0, d=2)
        val, _ = integrate.quad(lambda r: 2 * math.pi * r * mixture_pdf(m, np.array([r, 0.0])),
                                0, np.inf, epsabs=1e-13, limit=200)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_rejects_negative_weight(self):
        with pytest.raises(ValueError):
            MixtureDensity(BesselMixture({0: Fraction(3, 2), 1: Fraction(-1, 2)}))
        with pytest.raises(ValueError):
            MixtureDensity(BesselMixture({0: 1}), scale=0.0)
