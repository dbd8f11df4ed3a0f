"""Scalar special functions: K_nu, the Student characteristic kernel, constants.

``char_kernel(nu, u) = 2**(1-nu) / Gamma(nu) * u**nu * K_nu(u)`` is the radial
profile of the Student characteristic function.  For ``nu = n + 1/2`` it is
evaluated as ``exp(-u) q_n(u)``; the ``route="bessel"`` option forces the
general Bessel evaluation instead, which is what the half-integer bridge
checks compare.

Array evaluation goes through :mod:`student_levy._kernels`, which is the
compiled extension when it has been built.
"""
import math

import numpy as np

from . import _kernels
from ._mpbessel import log_char_kernel_mp

__all__ = [
    "gamma",
    "log_gamma",
    "macdonald_k",
    "log_macdonald_k",
    "char_kernel",
    "log_char_kernel",
    "char_kernel_mp",
    "student_norm_const",
    "log_student_norm_const",
    "inv_gamma_const",
    "log_inv_gamma_const",
]

_LOG_TINY = math.log(np.finfo(float).tiny)


def _check_nu(nu):
    if not nu > 0 or not math.isfinite(nu):
        raise ValueError(f"nu must be a positive finite number, got {nu!r}")


def _finish(values, scalar):
    return float(values[0]) if scalar else values


gamma = math.gamma
log_gamma = math.lgamma


def log_macdonald_k(nu, u):
    """Natural log of K_nu(u) for u > 0; any real order (K_{-nu} = K_nu)."""
    if not math.isfinite(nu):
        raise ValueError(f"nu must be finite, got {nu!r}")
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(~(u > 0)):
        raise ValueError("K_nu(u) requires u > 0")
    return _finish(_kernels.log_besselk(abs(nu), u), scalar)


def macdonald_k(nu, u):
    """Modified Bessel function of the second kind K_nu(u), u > 0."""
    scalar = np.ndim(u) == 0
    out = np.exp(np.atleast_1d(log_macdonald_k(nu, u)))
    return _finish(out, scalar)


def log_char_kernel(nu, u, route="auto"):
    """log k_nu(u); ``route`` is ``"auto"`` or ``"bessel"``."""
    _check_nu(nu)
    scalar = np.ndim(u) == 0
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(u < 0):
        raise ValueError("char_kernel requires u >= 0")
    if route == "auto":
        out = _kernels.log_char_kernel(nu, u)
    elif route == "bessel":
        out = np.zeros_like(u)
        pos = u > 0
        const = (1.0 - nu) * math.log(2.0) - math.lgamma(nu)
        out[pos] = np.minimum(const + nu * np.log(u[pos]) + _kernels.log_besselk(nu, u[pos]), 0.0)
    else:
        raise ValueError(f"unknown route {route!r}")
    return _finish(out, scalar)


def char_kernel(nu, u, route="auto"):
    """k_nu(u), equal to 1 at u = 0 and decreasing to 0.

    Values below the smallest normal double are returned as 0.
    """
    scalar = np.ndim(u) == 0
    lk = np.atleast_1d(log_char_kernel(nu, u, route=route))
    out = np.where(lk < _LOG_TINY, 0.0, np.exp(lk))
    return _finish(out, scalar)


def char_kernel_mp(nu, u, prec=160):
    """log k_nu(u) as a gmpy2 mpfr carrying ``prec`` bits."""
    _check_nu(float(nu))
    if not u > 0:
        raise ValueError("u must be positive")
    return log_char_kernel_mp(nu, u, prec)


def log_student_norm_const(nu, d=1):
    _check_nu(nu)
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError("dimension d must be a positive integer")
    return math.lgamma(nu + d / 2.0) - math.lgamma(nu) - d * 0.5 * math.log(math.pi)


def student_norm_const(nu, d=1):
    """A_{d,nu} = Gamma(nu + d/2) / (Gamma(nu) Gamma(1/2)**d)."""
    return math.exp(log_student_norm_const(nu, d))


def log_inv_gamma_const(nu):
    _check_nu(nu)
    return -2.0 * nu * math.log(2.0) - math.lgamma(nu)


def inv_gamma_const(nu):
    """C_nu = 1 / (2**(2 nu) Gamma(nu)), the inverse-Gamma normaliser."""
    return math.exp(log_inv_gamma_const(nu))
