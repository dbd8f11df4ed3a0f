# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot loops in ``_pykernels``."""
import numpy as np

from libc.math cimport (cos, cosh, exp, fabs, floor, lgamma, log, sin, sinh,
                        sqrt, M_PI)

from student_levy._pykernels import temme_gammas

cdef double EPS = 1e-16
cdef double LN2 = 0.6931471805599453
cdef double SERIES_XMAX = 2.0
cdef double TINY_U = 1e-100
cdef double RESCALE = 1e250
cdef double LOG_RESCALE = 575.6462732485114
cdef enum:
    MAX_FAST_N = 120


cdef struct Temme:
    double mu
    double mu2
    int nl
    double gam1
    double gam2
    double gampl
    double gammi
    double fact


cdef Temme _prepare(double nu):
    cdef Temme t
    nu = fabs(nu)
    t.nl = <int>(nu + 0.5)
    t.mu = nu - t.nl
    t.mu2 = t.mu * t.mu
    g1, g2, gp, gm = temme_gammas(t.mu)
    t.gam1 = g1
    t.gam2 = g2
    t.gampl = gp
    t.gammi = gm
    cdef double pimu = M_PI * t.mu
    t.fact = 1.0 if fabs(pimu) < EPS else pimu / sin(pimu)
    return t


cdef double _log_besselk(Temme* t, double x) nogil:
    cdef double mu = t.mu, mu2 = t.mu2
    cdef double kmu, k1, logscale = 0.0
    cdef double x2, d, e, fact2, ff, total, total1, ee, p, q, c, dd, delta
    cdef double b, h, delh, q1, q2, a1, a, s, qnew, dels, knew, cc
    cdef int i
    if x <= SERIES_XMAX:
        x2 = 0.5 * x
        d = -log(x2)
        e = mu * d
        if fabs(e) < 1e-8:
            fact2 = 1.0 + e * e / 6.0
        else:
            fact2 = sinh(e) / e
        ff = t.fact * (t.gam1 * cosh(e) + t.gam2 * fact2 * d)
        total = ff
        ee = exp(e)
        p = 0.5 * ee / t.gampl
        q = 0.5 / (ee * t.gammi)
        c = 1.0
        dd = x2 * x2
        total1 = p
        i = 1
        while i <= 500:
            ff = (i * ff + p + q) / (i * i - mu2)
            c *= dd / i
            p /= (i - mu)
            q /= (i + mu)
            delta = c * ff
            total += delta
            total1 += c * (p - i * ff)
            if fabs(delta) < fabs(total) * EPS:
                break
            i += 1
        kmu = total
        k1 = total1 * (2.0 / x)
    else:
        b = 2.0 * (1.0 + x)
        d = 1.0 / b
        h = d
        delh = d
        q1 = 0.0
        q2 = 1.0
        a1 = 0.25 - mu2
        q = a1
        cc = a1
        a = -a1
        s = 1.0 + q * delh
        i = 2
        while i <= 10000:
            a -= 2 * (i - 1)
            cc = -a * cc / i
            qnew = (q1 - b * q2) / a
            q1 = q2
            q2 = qnew
            q += cc * qnew
            b += 2.0
            d = 1.0 / (b + a * d)
            delh = (b * d - 1.0) * delh
            h += delh
            dels = q * delh
            s += dels
            if fabs(dels / s) < EPS:
                break
            i += 1
        h = a1 * h
        kmu = sqrt(M_PI / (2.0 * x)) / s
        k1 = kmu * (mu + x + 0.5 - h) / x
        logscale = -x
    if t.nl == 0:
        return log(kmu) + logscale
    for i in range(1, t.nl):
        knew = (mu + i) * (2.0 / x) * k1 + kmu
        kmu = k1
        k1 = knew
        if fabs(k1) > RESCALE:
            k1 /= RESCALE
            kmu /= RESCALE
            logscale += LOG_RESCALE
    return log(k1) + logscale


cdef struct Kernel:
    Temme temme
    double nu
    double const
    int half_n
    int ncoef
    double coef[MAX_FAST_N + 1]


cdef double _log_char_kernel(Kernel* kr, double u) nogil:
    cdef double acc, v, out
    cdef int k
    if u <= 0.0:
        return 0.0
    if kr.half_n >= 0:
        acc = 0.0
        if u <= 1.0:
            for k in range(kr.ncoef - 1, -1, -1):
                acc = acc * u + kr.coef[k]
            out = -u + log(acc)
        else:
            v = 1.0 / u
            for k in range(kr.ncoef):
                acc = acc * v + kr.coef[k]
            out = -u + log(acc) + kr.half_n * log(u)
    else:
        if kr.nu >= 0.5 and u < TINY_U:
            return 0.0
        out = kr.const + kr.nu * log(u) + _log_besselk(&kr.temme, u)
    if out > 0.0:
        return 0.0
    return out


cdef int _half_integer_order(double nu):
    cdef double twice = 2.0 * nu
    if twice == floor(twice) and (<long>twice) % 2 == 1:
        return <int>(((<long>twice) - 1) // 2)
    return -1


cdef class _KernelHolder:
    cdef Kernel k

    def __init__(self, double nu):
        cdef int j, n
        self.k.nu = nu
        self.k.temme = _prepare(nu)
        self.k.const = (1.0 - nu) * LN2 - lgamma(nu)
        n = _half_integer_order(nu)
        if n > MAX_FAST_N:
            n = -1
        self.k.half_n = n
        self.k.coef[0] = 1.0
        self.k.ncoef = 1
        if n >= 0:
            for j in range(n):
                self.k.coef[j + 1] = self.k.coef[j] * 2.0 * (n - j) / ((2 * n - j) * (j + 1))
            self.k.ncoef = n + 1


def log_besselk(double nu, x):
    cdef double[::1] xv = np.ascontiguousarray(np.atleast_1d(x), dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Temme t = _prepare(nu)
    with nogil:
        for i in range(n):
            ov[i] = _log_besselk(&t, xv[i])
    return out


def log_char_kernel(double nu, u):
    cdef double[::1] uv = np.ascontiguousarray(np.atleast_1d(u), dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef _KernelHolder holder = _KernelHolder(nu)
    with nogil:
        for i in range(n):
            ov[i] = _log_char_kernel(&holder.k, uv[i])
    return out


def char_kernel_pow(double nu, double c, u):
    cdef double[::1] uv = np.ascontiguousarray(np.atleast_1d(u), dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    cdef _KernelHolder holder = _KernelHolder(nu)
    with nogil:
        for i in range(n):
            ov[i] = exp(c * _log_char_kernel(&holder.k, uv[i]))
    return out


def cos_quadrature(double nu, double c, double x, nodes, weights):
    cdef double[::1] uv = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef double[::1] wv = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = uv.shape[0], i
    cdef double acc = 0.0
    cdef _KernelHolder holder = _KernelHolder(nu)
    with nogil:
        for i in range(n):
            acc += wv[i] * cos(uv[i] * x) * exp(c * _log_char_kernel(&holder.k, uv[i]))
    return acc
