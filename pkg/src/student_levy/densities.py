"""Closed-form densities: Student, inverse Gamma, Gaussian semigroup, Bessel mixtures.

Densities accept a single point or a batch.  For ``d = 1`` a scalar is one
point and a 1-d array is a batch; for ``d > 1`` an array of shape ``(d,)``
is one point and ``(n, d)`` is a batch.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .exactpoly import BesselMixture
from .specfun import log_inv_gamma_const, log_student_norm_const

__all__ = [
    "StudentParams",
    "SubordinatorParams",
    "MixtureDensity",
    "student_pdf",
    "student_logpdf",
    "inv_gamma_pdf",
    "inv_gamma_logpdf",
    "gaussian_semigroup_pdf",
    "mixture_pdf",
]


@dataclass(frozen=True)
class StudentParams:
    """Student law with ``2 nu`` degrees of freedom in dimension ``d``.

    ``scale`` is an optional symmetric positive definite matrix K; ``None``
    means the spherical law (K = identity).
    """

    nu: float
    d: int = 1
    scale: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")
        if not isinstance(self.d, (int, np.integer)) or self.d < 1:
            raise ValueError("d must be a positive integer")
        if self.scale is not None:
            K = np.array(self.scale, dtype=float, copy=True)
            if K.shape != (self.d, self.d):
                raise ValueError(f"scale matrix must be {self.d}x{self.d}")
            if not np.allclose(K, K.T, rtol=0, atol=1e-12 * max(1.0, np.abs(K).max())):
                raise ValueError("scale matrix must be symmetric")
            try:
                L = np.linalg.cholesky(K)
            except np.linalg.LinAlgError:
                raise ValueError("scale matrix must be positive definite") from None
            K.setflags(write=False)
            L.setflags(write=False)
            object.__setattr__(self, "scale", K)
            object.__setattr__(self, "_chol", L)
        else:
            object.__setattr__(self, "_chol", None)

    @property
    def chol(self):
        """Lower Cholesky factor of K, or None in spherical mode."""
        return self._chol

    @property
    def log_det_scale(self) -> float:
        if self._chol is None:
            return 0.0
        return 2.0 * float(np.sum(np.log(np.diag(self._chol))))


@dataclass(frozen=True)
class SubordinatorParams:
    """Inverse-Gamma mixing law H_nu (law of 1/(4G), G ~ Gamma(nu, 1))."""

    nu: float

    def __post_init__(self):
        if not self.nu > 0:
            raise ValueError("nu must be positive")


@dataclass(frozen=True)
class MixtureDensity:
    """``sum_j beta_j scale**-d f_{j+1/2}(x / scale)`` in dimension ``d``."""

    mixture: BesselMixture
    scale: float = 1.0
    d: int = 1

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        weights = self.mixture.float_weights()
        if any(w < 0 for w in weights.values()):
            raise ValueError("mixture weights must be nonnegative")
        if abs(sum(weights.values()) - 1.0) > 1e-12:
            raise ValueError("mixture weights must sum to 1")


def _as_points(x, d):
    """Return (array of shape (n, d), was_single_point)."""
    arr = np.asarray(x, dtype=float)
    if d == 1:
        if arr.ndim == 0:
            return arr.reshape(1, 1), True
        if arr.ndim == 1:
            return arr.reshape(-1, 1), False
        if arr.ndim == 2 and arr.shape[1] == 1:
            return arr, False
    else:
        if arr.ndim == 1 and arr.shape[0] == d:
            return arr.reshape(1, d), True
        if arr.ndim == 2 and arr.shape[1] == d:
            return arr, False
    raise ValueError(f"point(s) of shape {arr.shape} do not match dimension d={d}")


def _squared_norm(p: StudentParams, pts):
    if p.chol is None:
        return np.einsum("ij,ij->i", pts, pts)
    z = solve_triangular(p.chol, pts.T, lower=True)
    return np.einsum("ij,ij->j", z, z)


def student_logpdf(p: StudentParams, x):
    pts, single = _as_points(x, p.d)
    r2 = _squared_norm(p, pts)
    logc = log_student_norm_const(p.nu, p.d) - 0.5 * p.log_det_scale
    out = logc - (p.nu + p.d / 2.0) * np.log1p(r2)
    return float(out[0]) if single else out


def student_pdf(p: StudentParams, x):
    """``A_{d,nu} |K|^{-1/2} (1 + x^T K^{-1} x)^{-(nu + d/2)}``."""
    out = student_logpdf(p, x)
    return math.exp(out) if np.ndim(out) == 0 else np.exp(out)


def inv_gamma_logpdf(p: SubordinatorParams, t):
    t_arr = np.asarray(t, dtype=float)
    if np.any(~(t_arr > 0)):
        raise ValueError("inverse Gamma density requires t > 0")
    out = log_inv_gamma_const(p.nu) - 0.25 / t_arr - (p.nu + 1.0) * np.log(t_arr)
    return float(out) if out.ndim == 0 else out


def inv_gamma_pdf(p: SubordinatorParams, t):
    """``h_nu(t) = C_nu exp(-1/(4t)) t**(-nu-1)``."""
    out = inv_gamma_logpdf(p, t)
    return math.exp(out) if np.ndim(out) == 0 else np.exp(out)


def gaussian_semigroup_pdf(t, x, d=None):
    """Heat kernel ``(4 pi t)**(-d/2) exp(-|x|**2 / (4t))``; variance 2t per coordinate.

    Without ``d``, scalars and 1-d arrays are points of R and an ``(n, d)``
    array is a batch in R^d; pass ``d`` for a single vector in R^d.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    arr = np.asarray(x, dtype=float)
    if d is None:
        d = 1 if arr.ndim <= 1 else arr.shape[-1]
    pts, single = _as_points(arr, d)
    r2 = np.einsum("ij,ij->i", pts, pts)
    out = np.exp(-r2 / (4.0 * t) - 0.5 * d * math.log(4.0 * math.pi * t))
    return float(out[0]) if single else out


def mixture_pdf(m: MixtureDensity, x):
    """``sum_j beta_j scale**-d f_{j+1/2}(x / scale)``."""
    pts, single = _as_points(x, m.d)
    r2 = np.einsum("ij,ij->i", pts, pts) / m.scale**2
    total = np.zeros(len(pts))
    for j, beta in m.mixture.float_weights().items():
        if beta == 0:
            continue
        nu = j + 0.5
        logc = log_student_norm_const(nu, m.d)
        total += beta * np.exp(logc - (nu + m.d / 2.0) * np.log1p(r2))
    total /= m.scale**m.d
    return float(total[0]) if single else total
