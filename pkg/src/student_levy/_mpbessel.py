"""Multiprecision log k_nu(u) on gmpy2 mpfr, for real-axis Laplace inversion.

Same Temme series / Steed continued fraction split as the double kernels,
with the series range widened and guard bits added so the continued
fraction is only used where it converges quickly.
"""
import functools
import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

# series is used for x <= _SERIES_XMAX; cancellation costs about 2x/ln 2 bits
_SERIES_XMAX = 12
_GUARD_BITS = 48


@functools.lru_cache(maxsize=256)
def _temme_constants(nu_key, prec):
    nu = Fraction(nu_key)
    nl = math.floor(nu + Fraction(1, 2))
    with gmpy2.context(gmpy2.get_context(), precision=prec):
        mu = mpfr(nu.numerator) / nu.denominator - nl
        if mu == 0:
            gam1 = -gmpy2.const_euler()
            gam2 = mpfr(1)
            gampl = gammi = mpfr(1)
            fact = mpfr(1)
        else:
            # extra precision absorbs the cancellation in gam1 for small mu
            extra = prec + max(0, -int(gmpy2.floor(gmpy2.log2(abs(mu))))) + 16
            with gmpy2.context(gmpy2.get_context(), precision=extra):
                mux = mpfr(nu.numerator) / nu.denominator - nl
                gampl = 1 / gmpy2.gamma(1 + mux)
                gammi = 1 / gmpy2.gamma(1 - mux)
                gam1 = (gammi - gampl) / (2 * mux)
                gam2 = (gammi + gampl) / 2
                pimu = gmpy2.const_pi() * mux
                fact = pimu / gmpy2.sin(pimu)
            gam1, gam2, gampl, gammi, fact = (
                mpfr(v) for v in (gam1, gam2, gampl, gammi, fact)
            )
        return nl, mu, gam1, gam2, gampl, gammi, fact


def _log_besselk(nu_key, x, prec):
    nl, mu, gam1, gam2, gampl, gammi, fact = _temme_constants(nu_key, prec)
    eps = mpfr(2) ** (-prec)
    mu2 = mu * mu
    if x <= _SERIES_XMAX:
        x2 = x / 2
        d = -gmpy2.log(x2)
        e = mu * d
        fact2 = mpfr(1) if e == 0 else gmpy2.sinh(e) / e
        ff = fact * (gam1 * gmpy2.cosh(e) + gam2 * fact2 * d)
        total = ff
        ee = gmpy2.exp(e)
        p = ee / (2 * gampl)
        q = 1 / (2 * ee * gammi)
        c = mpfr(1)
        dd = x2 * x2
        total1 = p
        i = 1
        while True:
            ff = (i * ff + p + q) / (i * i - mu2)
            c = c * dd / i
            p = p / (i - mu)
            q = q / (i + mu)
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if abs(delta) < abs(total) * eps:
                break
            i += 1
        kmu = total
        k1 = total1 * 2 / x
        logscale = mpfr(0)
    else:
        b = 2 * (1 + x)
        d = 1 / b
        h = delh = d
        q1 = mpfr(0)
        q2 = mpfr(1)
        a1 = mpfr(1) / 4 - mu2
        q = c = a1
        a = -a1
        s = 1 + q * delh
        i = 2
        while True:
            a -= 2 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1, q2 = q2, qnew
            q += c * qnew
            b += 2
            d = 1 / (b + a * d)
            delh = (b * d - 1) * delh
            h += delh
            dels = q * delh
            s += dels
            if abs(dels) < abs(s) * eps:
                break
            i += 1
        h = a1 * h
        kmu = gmpy2.sqrt(gmpy2.const_pi() / (2 * x)) / s
        k1 = kmu * (mu + x + mpfr(1) / 2 - h) / x
        logscale = -x
    if nl == 0:
        return gmpy2.log(kmu) + logscale
    for i in range(1, nl):
        kmu, k1 = k1, (mu + i) * 2 / x * k1 + kmu
    return gmpy2.log(k1) + logscale


@functools.lru_cache(maxsize=64)
def _bessel_poly_exact(n):
    coef = [Fraction(1)]
    for k in range(n):
        coef.append(coef[-1] * Fraction(2 * (n - k), (2 * n - k) * (k + 1)))
    return tuple(coef)


def log_char_kernel_mp(nu, u, prec):
    """log k_nu(u) as an mpfr with ``prec`` bits; ``nu`` is any exact-convertible real.

    ``u`` is a positive mpfr (or anything mpfr accepts).
    """
    nu_frac = Fraction(nu)
    work = prec + _GUARD_BITS
    with gmpy2.context(gmpy2.get_context(), precision=work):
        u = mpfr(u)
        if nu_frac.denominator == 2:
            n = (nu_frac.numerator - 1) // 2
            acc = mpfr(0)
            for a in reversed(_bessel_poly_exact(n)):
                acc = acc * u + mpfr(a.numerator) / a.denominator
            return -u + gmpy2.log(acc)
        nuf = mpfr(nu_frac.numerator) / nu_frac.denominator
        const = (1 - nuf) * gmpy2.log(mpfr(2)) - gmpy2.lgamma(nuf)[0]
        return const + nuf * gmpy2.log(u) + _log_besselk(nu_frac, u, work)
