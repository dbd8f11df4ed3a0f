"""Monte Carlo sampling of Student vectors and weighted Student walks.

A Student vector with parameter nu is drawn by Gaussian subordination:
``T = 1/(4G)`` with ``G ~ Gamma(nu, 1)``, then ``X = sqrt(2T) L Z`` with
``Z`` standard normal and ``L`` the Cholesky factor of the scale matrix.

Draws are produced in fixed-size chunks, each from its own substream
spawned off ``numpy.random.SeedSequence(seed)``, so a batch depends only on
``(seed, spec, n)`` and chunks can be generated in parallel.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .densities import StudentParams
from .exactpoly import BesselMixture

__all__ = [
    "WalkSpec",
    "SampleBatch",
    "sample_student",
    "sample_walk",
    "empirical_tail_count",
    "student_cdf",
    "mixture_cdf",
    "ks_test",
    "binned_chi2",
    "second_moment",
]

CHUNK_SIZE = 1 << 16


@dataclass(frozen=True)
class WalkSpec:
    """``Y = sum_i a_i X_i`` with independent ``X_i`` of parameter ``n_i + 1/2``."""

    degrees: tuple
    weights: tuple
    d: int = 1
    scale: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        degrees = tuple(int(n) for n in self.degrees)
        if not degrees:
            raise ValueError("a walk needs at least one step")
        if any(n < 0 for n in degrees):
            raise ValueError("degrees must be non-negative integers")
        if len(self.weights) != len(degrees):
            raise ValueError("degrees and weights must have the same length")
        weights = tuple(float(Fraction(w)) if isinstance(w, str) else float(w) for w in self.weights)
        if any(not w > 0 for w in weights):
            raise ValueError("weights must be positive")
        if abs(math.fsum(weights) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "weights", weights)
        # validates d and the scale matrix
        StudentParams(0.5, self.d, self.scale)

    def describe(self) -> dict:
        return {
            "kind": "walk",
            "degrees": list(self.degrees),
            "weights": [repr(w) for w in self.weights],
            "d": self.d,
            "scale": None if self.scale is None else np.asarray(self.scale).tolist(),
        }


def _describe_student(p: StudentParams) -> dict:
    return {
        "kind": "student",
        "nu": repr(float(p.nu)),
        "d": p.d,
        "scale": None if p.scale is None else p.scale.tolist(),
    }


@dataclass
class SampleBatch:
    """Draws as an ``(n, d)`` array plus the seed and spec that reproduce them."""

    points: np.ndarray
    seed: int
    spec: dict

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[0] < 1:
            raise ValueError("points must be an (n, d) array with n >= 1")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"x{i + 1}" for i in range(self.d)])
        for row in self.points:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def sidecar(self) -> dict:
        return {"seed": int(self.seed), "n": self.n, "spec": self.spec}

    def sidecar_json(self) -> str:
        return json.dumps(self.sidecar(), sort_keys=True, indent=2)

    def save(self, csv_path, json_path=None):
        with open(csv_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv())
        if json_path is None:
            json_path = str(csv_path) + ".json"
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.sidecar_json() + "\n")
        return json_path


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _draw_student(rng, nu, chol, n, d):
    g = rng.standard_gamma(nu, size=n)
    z = rng.standard_normal(size=(n, d))
    # sqrt(2T) with T = 1/(4G)
    x = z * np.sqrt(0.5 / g)[:, None]
    if chol is not None:
        x = x @ chol.T
    return x


def _chunked(seed, n, d, draw, workers):
    n_chunks = -(-n // CHUNK_SIZE)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK_SIZE, n - i * CHUNK_SIZE) for i in range(n_chunks)]

    def job(i):
        return draw(np.random.default_rng(children[i]), sizes[i])

    if workers > 1 and n_chunks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(n_chunks)))
    else:
        parts = [job(i) for i in range(n_chunks)]
    return np.concatenate(parts, axis=0).reshape(n, d)


def sample_student(p: StudentParams, n: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``n`` Student vectors with parameter ``p``.

    Examples
    --------
    >>> b = sample_student(StudentParams(1.5), 1000, seed=1)
    >>> b.points.shape
    (1000, 1)
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    seed = _check_seed(seed)
    pts = _chunked(seed, n, p.d, lambda rng, m: _draw_student(rng, p.nu, p.chol, m, p.d), workers)
    return SampleBatch(pts, seed, _describe_student(p))


def sample_walk(w: WalkSpec, n: int, seed: int, workers: int = 1) -> SampleBatch:
    """Draw ``n`` copies of ``sum_i a_i X_i``.

    A one-step walk with weight 1 reproduces :func:`sample_student` bit for
    bit under the same seed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    seed = _check_seed(seed)
    chol = StudentParams(0.5, w.d, w.scale).chol

    def draw(rng, m):
        total = np.zeros((m, w.d))
        for deg, a in zip(w.degrees, w.weights):
            total += a * _draw_student(rng, deg + 0.5, chol, m, w.d)
        return total

    pts = _chunked(seed, n, w.d, draw, workers)
    return SampleBatch(pts, seed, w.describe())


def empirical_tail_count(batch: SampleBatch, threshold: float):
    """Fraction of draws with ``|x| > threshold`` and its binomial standard error."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    r = np.linalg.norm(batch.points, axis=1)
    p = float(np.mean(r > threshold))
    return p, math.sqrt(p * (1.0 - p) / batch.n)


def student_cdf(nu: float, x, scale: float = 1.0):
    """CDF of the 1-d Student law ``f_nu(x / scale) / scale``.

    ``f_nu`` is Student's t with ``2 nu`` degrees of freedom rescaled by
    ``1 / sqrt(2 nu)``.
    """
    z = np.asarray(x, dtype=float) / scale
    return stats.t.cdf(z * math.sqrt(2.0 * nu), df=2.0 * nu)


def mixture_cdf(mixture: BesselMixture, x, scale: float = 1.0):
    """CDF of ``sum_j beta_j f_{j+1/2}(x / scale) / scale`` in d = 1."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for j, beta in mixture.float_weights().items():
        if beta:
            out = out + beta * student_cdf(j + 0.5, x, scale)
    return out


def ks_test(batch: SampleBatch, cdf):
    """One-sample Kolmogorov-Smirnov test of a d = 1 batch; returns (statistic, p-value)."""
    if batch.d != 1:
        raise ValueError("KS test requires d = 1")
    res = stats.kstest(batch.points[:, 0], cdf)
    return float(res.statistic), float(res.pvalue)


def binned_chi2(batch: SampleBatch, cdf, edges):
    """Pearson chi-square of a d = 1 batch against ``cdf`` on the given bin edges.

    The two unbounded outer bins are added automatically.  Returns
    (statistic, p-value).
    """
    if batch.d != 1:
        raise ValueError("chi-square test requires d = 1")
    edges = np.asarray(edges, dtype=float)
    full = np.concatenate([[-np.inf], edges, [np.inf]])
    counts = np.histogram(batch.points[:, 0], bins=full)[0]
    probs = np.diff(np.concatenate([[0.0], cdf(edges), [1.0]]))
    expected = batch.n * probs
    stat = float(np.sum((counts - expected) ** 2 / expected))
    return stat, float(stats.chi2.sf(stat, len(counts) - 1))


def second_moment(batch: SampleBatch, coord: int = 0):
    """Sample mean of ``x_coord**2`` with its standard error."""
    sq = batch.points[:, coord] ** 2
    return float(np.mean(sq)), float(np.std(sq, ddof=1) / math.sqrt(batch.n))
