"""K_nu, the Student kernel and normalising constants against scipy/mpmath oracles."""
import importlib
import math
import os
import subprocess
import sys

import gmpy2
import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import kv, kve

from student_levy import _pykernels, specfun
from student_levy.exactpoly import bessel_q

BACKENDS = [_pykernels]
try:
    BACKENDS.append(importlib.import_module("student_levy._ckernels"))
except ImportError:  # extension not built
    pass

NU_GRID = [0.01, 0.3, 0.5, 0.999, 1.0, 1.5, 2.0, 2.25, 3.7, 7.5, 12.0, 25.2]
U_GRID = np.concatenate([np.geomspace(1e-8, 1.0, 30), np.linspace(1.1, 80.0, 60)])
KERNEL_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0)


def log_kernel_oracle(nu, u):
    return (1 - nu) * math.log(2) - math.lgamma(nu) + nu * np.log(u) + np.log(kve(nu, u)) - u


@pytest.fixture(params=BACKENDS, ids=lambda m: m.__name__.rsplit(".", 1)[-1])
def backend(request):
    return request.param


class TestBesselK:
    @pytest.mark.parametrize("nu", NU_GRID)
    def test_against_scipy(self, backend, nu):
        got = backend.log_besselk(nu, U_GRID)
        ref = np.log(kve(nu, U_GRID)) - U_GRID
        np.testing.assert_allclose(got, ref, rtol=1e-13, atol=1e-13)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 1.3, 2.0, 4.75])
    def test_recurrence(self, nu):
        u = np.linspace(0.05, 40.0, 200)
        lhs = specfun.macdonald_k(nu + 1, u)
        rhs = specfun.macdonald_k(nu - 1, u) + 2 * nu / u * specfun.macdonald_k(nu, u)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10)

    @pytest.mark.parametrize("nu", [0.2, 1.0, 3.5])
    def test_positive_and_log_convex(self, nu):
        u = np.linspace(0.01, 50, 2000)
        lk = specfun.log_macdonald_k(nu, u)
        assert np.all(np.isfinite(lk))
        assert np.all(np.diff(lk, 2) >= -1e-12)

    def test_large_order_no_overflow(self):
        assert specfun.log_macdonald_k(60.3, 1e-3) == pytest.approx(math.log(kv(60.3, 1e-3)), rel=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            specfun.macdonald_k(1.0, 0.0)
        assert specfun.macdonald_k(-1.5, 2.0) == specfun.macdonald_k(1.5, 2.0)


class TestCharKernel:
    @pytest.mark.parametrize("nu", NU_GRID)
    def test_against_scipy(self, backend, nu):
        got = backend.log_char_kernel(nu, U_GRID)
        np.testing.assert_allclose(got, np.minimum(log_kernel_oracle(nu, U_GRID), 0.0), rtol=1e-12, atol=1e-13)

    def test_backends_agree(self):
        if len(BACKENDS) < 2:
            pytest.skip("compiled extension not built")
        py, cy = BACKENDS
        for nu in (0.35, 1.5, 2.0, 10.5):
            np.testing.assert_allclose(py.log_char_kernel(nu, U_GRID), cy.log_char_kernel(nu, U_GRID),
                                       rtol=1e-14, atol=1e-15)
            nodes = np.linspace(0, 30, 301)
            w = np.full_like(nodes, 0.1)
            assert py.cos_quadrature(nu, 2.5, 3.0, nodes, w) == pytest.approx(
                cy.cos_quadrature(nu, 2.5, 3.0, nodes, w), rel=1e-13, abs=1e-16)

    @pytest.mark.parametrize("n", range(11))
    def test_half_integer_bridge(self, n):
        q = bessel_q(n)
        for u in KERNEL_GRID:
            exact = float(mpmath.exp(-u) * sum(mpmath.mpf(c.numerator) / c.denominator * mpmath.mpf(u) ** k
                                               for k, c in enumerate(q.coeffs)))
            for route in ("auto", "bessel"):
                assert specfun.char_kernel(n + 0.5, u, route=route) == pytest.approx(exact, rel=1e-10)

    def test_value_at_zero(self):
        assert specfun.char_kernel(1.7, 0.0) == 1.0
        assert specfun.char_kernel(0.5, 0.0) == 1.0

    @settings(max_examples=50, deadline=None)
    @given(st.floats(0.05, 20.0))
    def test_bounds_and_monotone(self, nu):
        u = np.linspace(0.0, 60.0, 3000)
        k = specfun.char_kernel(nu, u)
        assert k[0] == 1.0
        assert np.all(k[1:] < 1.0) and np.all(k >= 0.0)
        assert np.all(np.diff(k) <= 0.0)

    def test_underflow_returns_zero(self):
        assert specfun.char_kernel(1.5, 1000.0) == 0.0
        assert specfun.log_char_kernel(1.5, 1000.0) < -900

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            specfun.log_char_kernel(1.0, 1.0, route="series")

    def test_cauchy_kernel(self):
        u = np.linspace(0, 30, 50)
        np.testing.assert_allclose(specfun.char_kernel(0.5, u), np.exp(-u), rtol=1e-15)


class TestMultiprecisionKernel:
    @pytest.mark.parametrize("nu", ["0.3", "1", "2.25", "7/2", "9.1"])
    @pytest.mark.parametrize("u", ["1e-6", "0.5", "3", "11.5", "40"])
    def test_against_mpmath(self, nu, u):
        from fractions import Fraction
        nu_f = Fraction(nu)
        with mpmath.workdps(60):
            nu_m = mpmath.mpf(nu_f.numerator) / nu_f.denominator
            um = mpmath.mpf(u)
            ref = ((1 - nu_m) * mpmath.log(2) - mpmath.loggamma(nu_m) + nu_m * mpmath.log(um)
                   + mpmath.log(mpmath.besselk(nu_m, um)))
            got = specfun.char_kernel_mp(nu_f, gmpy2.mpfr(u, 256), prec=200)
            assert abs(mpmath.mpf(str(got)) - ref) < mpmath.mpf(10) ** -45 * max(1, abs(ref))

    def test_requires_positive_u(self):
        with pytest.raises(ValueError):
            specfun.char_kernel_mp(1.5, 0)


class TestConstants:
    def test_student_constants(self):
        assert specfun.student_norm_const(0.5) == pytest.approx(1 / math.pi, rel=1e-15)
        assert specfun.student_norm_const(1.5) == pytest.approx(2 / math.pi, rel=1e-15)
        assert specfun.student_norm_const(1.0, 2) == pytest.approx(1 / math.pi, rel=1e-15)

    def test_inverse_gamma_constants(self):
        assert specfun.inv_gamma_const(0.5) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-15)
        assert specfun.inv_gamma_const(2.0) == pytest.approx(1 / 16, rel=1e-15)

    def test_large_nu_stays_finite(self):
        assert math.isfinite(specfun.student_norm_const(400.0, 3))

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_bad_dimension(self, bad):
        with pytest.raises(ValueError):
            specfun.student_norm_const(1.0, bad)

    def test_gamma_accuracy(self):
        for x in (0.1, 0.5, 3.3, 17.2):
            assert specfun.gamma(x) == pytest.approx(float(mpmath.gamma(x)), rel=1e-13)


class TestBackendSelection:
    def test_environment_forces_fallback(self):
        env = dict(os.environ, STUDENT_LEVY_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "import student_levy; print(student_levy.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"

    def test_default_prefers_extension(self):
        from student_levy import BACKEND
        forced = os.environ.get("STUDENT_LEVY_PURE_PYTHON") == "1"
        assert BACKEND == ("cython" if len(BACKENDS) == 2 and not forced else "python")
