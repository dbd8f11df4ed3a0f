"""Pure numpy implementations of the numerical hot loops.

These mirror ``_ckernels.pyx`` one for one and are used when the compiled
extension is unavailable (or when ``STUDENT_LEVY_PURE_PYTHON=1``).
"""
import math

import numpy as np

EPS = 1e-16
LN2 = math.log(2.0)
SERIES_XMAX = 2.0
# below this argument k_nu(u) == 1 in double precision for nu >= 1/2
TINY_U = 1e-100
RESCALE = 1e250
# largest n for which k_{n+1/2} is evaluated as exp(-u) q_n(u)
MAX_FAST_N = 120

# Taylor coefficients of 1/Gamma(z) about 0; RGAMMA_TAYLOR[k] multiplies z**k
RGAMMA_TAYLOR = (
    0.0,
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18,
)


def temme_gammas(mu):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    gam1 = 0.0
    gam2 = 0.0
    # gam1 = -sum_{k even} c_k mu^(k-2), gam2 = sum_{k odd} c_k mu^(k-1)
    for k in range(len(RGAMMA_TAYLOR) - 1, 0, -1):
        if k % 2 == 0:
            gam1 = gam1 * mu * mu - RGAMMA_TAYLOR[k]
        else:
            gam2 = gam2 * mu * mu + RGAMMA_TAYLOR[k]
    gampl = gam2 - mu * gam1
    gammi = gam2 + mu * gam1
    return gam1, gam2, gampl, gammi


def half_integer_order(nu):
    """Return n when ``nu == n + 1/2`` exactly, else -1."""
    twice = 2.0 * nu
    if twice == math.floor(twice) and int(twice) % 2 == 1:
        return (int(twice) - 1) // 2
    return -1


def bessel_poly_float(n):
    """Float coefficients of q_n in increasing degree."""
    coef = [1.0]
    for k in range(n):
        coef.append(coef[-1] * 2.0 * (n - k) / ((2 * n - k) * (k + 1)))
    return np.array(coef)


def log_bessel_poly(n, u):
    """log q_n(u) for u >= 0, overflow-safe for large u."""
    u = np.asarray(u, dtype=float)
    coef = bessel_poly_float(n)
    out = np.empty_like(u)
    small = u <= 1.0
    us = u[small]
    acc = np.zeros_like(us)
    for a in coef[::-1]:
        acc = acc * us + a
    out[small] = np.log(acc)
    ub = u[~small]
    if ub.size:
        v = 1.0 / ub
        acc = np.zeros_like(ub)
        for a in coef:
            acc = acc * v + a
        out[~small] = np.log(acc) + n * np.log(ub)
    return out


def log_besselk(nu, x):
    """log K_nu(x) for x > 0, nu >= 0, elementwise over an array."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    nu = abs(float(nu))
    nl = int(nu + 0.5)
    mu = nu - nl
    mu2 = mu * mu
    out = np.empty_like(x)
    kmu = np.empty_like(x)
    k1 = np.empty_like(x)
    logscale = np.zeros_like(x)

    ser = x <= SERIES_XMAX
    if ser.any():
        xs = x[ser]
        gam1, gam2, gampl, gammi = temme_gammas(mu)
        pimu = math.pi * mu
        fact = 1.0 if abs(pimu) < EPS else pimu / math.sin(pimu)
        x2 = 0.5 * xs
        d = -np.log(x2)
        e = mu * d
        with np.errstate(invalid="ignore", divide="ignore"):
            fact2 = np.where(np.abs(e) < 1e-8, 1.0 + e * e / 6.0, np.sinh(e) / e)
        ff = fact * (gam1 * np.cosh(e) + gam2 * fact2 * d)
        total = ff.copy()
        ee = np.exp(e)
        p = 0.5 * ee / gampl
        q = 0.5 / (ee * gammi)
        c = np.ones_like(xs)
        dd = x2 * x2
        total1 = p.copy()
        i = 1
        while True:
            ff = (i * ff + p + q) / (i * i - mu2)
            c = c * dd / i
            p = p / (i - mu)
            q = q / (i + mu)
            delta = c * ff
            total = total + delta
            total1 = total1 + c * (p - i * ff)
            if np.all(np.abs(delta) < np.abs(total) * EPS) or i > 500:
                break
            i += 1
        kmu[ser] = total
        with np.errstate(over="ignore"):
            k1[ser] = total1 * (2.0 / xs)

    cf = ~ser
    if cf.any():
        xc = x[cf]
        b = 2.0 * (1.0 + xc)
        d = 1.0 / b
        h = d.copy()
        delh = d.copy()
        q1 = np.zeros_like(xc)
        q2 = np.ones_like(xc)
        a1 = 0.25 - mu2
        q = np.full_like(xc, a1)
        c = a1
        a = -a1
        s = 1.0 + q * delh
        i = 2
        while True:
            a -= 2 * (i - 1)
            c = -a * c / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            q = q + c * qnew
            b = b + 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h = h + delh
            dels = q * delh
            s = s + dels
            if np.all(np.abs(dels / s) < EPS) or i > 10000:
                break
            i += 1
        h = a1 * h
        # exponentially scaled: true value is this times exp(-x)
        kscaled = np.sqrt(math.pi / (2.0 * xc)) / s
        kmu[cf] = kscaled
        k1[cf] = kscaled * (mu + xc + 0.5 - h) / xc
        logscale[cf] = -xc

    if nl == 0:
        out[:] = np.log(kmu) + logscale
        return out
    with np.errstate(over="ignore", invalid="ignore"):
        xi2 = 2.0 / x
        for i in range(1, nl):
            knew = (mu + i) * xi2 * k1 + kmu
            kmu = k1
            k1 = knew
            big = np.abs(k1) > RESCALE
            if big.any():
                k1[big] /= RESCALE
                kmu[big] /= RESCALE
                logscale[big] += math.log(RESCALE)
    out[:] = np.log(k1) + logscale
    return out


def log_char_kernel(nu, u):
    """log k_nu(u) for u >= 0; exactly 0 at u = 0."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.zeros_like(u)
    n = half_integer_order(nu)
    pos = u > 0
    if 0 <= n <= MAX_FAST_N:
        up = u[pos]
        out[pos] = -up + log_bessel_poly(n, up)
    else:
        if nu >= 0.5:
            pos &= u >= TINY_U
        up = u[pos]
        const = (1.0 - nu) * LN2 - math.lgamma(nu)
        out[pos] = const + nu * np.log(up) + log_besselk(nu, up)
    return np.minimum(out, 0.0)


def char_kernel_pow(nu, c, u):
    """k_nu(u)**c elementwise."""
    return np.exp(c * log_char_kernel(nu, u))


def cos_quadrature(nu, c, x, nodes, weights):
    """Sum of weights * cos(nodes * x) * k_nu(nodes)**c."""
    nodes = np.asarray(nodes, dtype=float)
    vals = char_kernel_pow(nu, c, nodes)
    return float(np.dot(np.asarray(weights, dtype=float), np.cos(nodes * x) * vals))
