"""Runnable acceptance checks, grouped into suites for ``student-levy verify``.

Each check returns a :class:`CriterionResult` carrying the measured values
that decided it.  Suites:

``theorem1``   nonnegative Bessel-mixture expansion (exact scan, Monte Carlo)
``corollary``  lowest mixture weight ``1 / N**(2n)``
``theorem2``   tail asymptotics, subordination route, normalization
``lemmas``     half-integer kernel bridge, coefficient monotonicity, ``q_n <= e**u``
``all``        every check
"""
from __future__ import annotations

import itertools
import math
import random
import time
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np
from gmpy2 import mpfr, mpq

from .config import DEFAULT_CONFIG, QuadratureConfig
from .densities import StudentParams
from .exactpoly import (
    ProductSpec,
    _alpha_row,
    bessel_alpha,
    bessel_q,
    carlitz_delta,
    carlitz_delta_closed_form,
    bessel_to_monomial,
    expand_product,
    expand_product_raw,
    monomial_to_bessel,
)
from .sampling import (
    WalkSpec,
    ks_test,
    mixture_cdf,
    sample_student,
    sample_walk,
    second_moment,
    student_cdf,
)
from .specfun import char_kernel
from .transforms import (
    ConvolutionSpec,
    LossOfPrecisionWarning,
    fourier_invert_density,
    subordinated_density,
    subordinator_tail_scan,
    tail_ratio_scan,
    total_mass,
)

__all__ = ["CriterionResult", "SUITES", "run_suite", "CRITERIA"]

KERNEL_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0)
ROUTE_MATRIX = tuple(itertools.product((0.5, 1.0, 1.5), (1.0, 2.0, 2.5)))


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        vals = ", ".join(f"{k}={_fmt(v)}" for k, v in self.measured.items())
        return f"[{status}] criterion {self.number}: {self.title} ({vals}; {self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {
            "number": self.number,
            "title": self.title,
            "passed": bool(self.passed),
            "measured": {k: _jsonable(v) for k, v in self.measured.items()},
            "seconds": self.seconds,
        }


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.3g}"
    return str(v)


def _jsonable(v):
    if isinstance(v, (bool, int, float, str)) or v is None:
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _spec(nu, c, d=1):
    return ConvolutionSpec(StudentParams(nu, d), c)


@_timed
def criterion_1(seed: int = 20240601, max_degree: int = 8, max_steps: int = 5, draws: int = 20):
    """Exact expansion scan: beta_j >= 0, sum 1, support [min n_i, sum n_i].

    Degree tuples are scanned as multisets: reordering degrees together with
    their weights leaves the product unchanged, and the weights are drawn
    at random per tuple.
    """
    rng = random.Random(seed)
    checked = 0
    bad = 0
    min_beta = None
    for N in range(1, max_steps + 1):
        for degrees in itertools.combinations_with_replacement(range(max_degree + 1), N):
            lo, hi = min(degrees), sum(degrees)
            for _ in range(draws):
                k = [rng.randint(1, 1000) for _ in degrees]
                total = sum(k)
                beta = expand_product_raw(degrees, [mpq(a, total) for a in k])
                checked += 1
                support = [j for j, b in enumerate(beta) if b != 0]
                ok = (all(b >= 0 for b in beta) and sum(beta) == 1
                      and support[0] == lo and support[-1] == hi)
                if not ok:
                    bad += 1
                positive = min(b for b in beta if b != 0)
                if min_beta is None or positive < min_beta:
                    min_beta = positive
    return CriterionResult(1, "Bessel-mixture expansion is a probability vector", bad == 0,
                           {"expansions": checked, "violations": bad,
                            "smallest_nonzero_beta": float(min_beta)})


@_timed
def criterion_2(max_n: int = 6, max_N: int = 6):
    """beta_n = 1 / N**(2n) for equal steps of degree n."""
    bad = []
    for n in range(max_n + 1):
        for N in range(1, max_N + 1):
            got = expand_product(ProductSpec.equal(n, N)).weights.get(n, Fraction(0))
            if got != Fraction(1, N ** (2 * n)):
                bad.append((n, N))
    examples = {
        "beta(n=1,N=2)": expand_product(ProductSpec.equal(1, 2)).weights[1],
        "beta(n=3,N=3)": expand_product(ProductSpec.equal(3, 3)).weights[3],
    }
    return CriterionResult(2, "lowest mixture weight equals 1/N^(2n)", not bad,
                           {"cases": (max_n + 1) * max_N, "mismatches": len(bad), **examples})


@_timed
def criterion_3(cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Tail ratios within 1% at x = 50; exact Cauchy curve to 1e-6 for nu = 1/2."""
    xs = [5.0, 10.0, 20.0, 50.0]
    measured = {}
    ok = True
    for nu, c in ((1.5, 2.0), (1.5, 2.5), (0.5, 3.0), (1.0, 2.0)):
        rep = tail_ratio_scan(_spec(nu, c), xs, cfg)
        passed = rep.final_deviation <= 0.01
        measured[f"dev(nu={nu:g},c={c:g})"] = rep.final_deviation
        if rep.reference is not None:
            err = max(abs(a - b) for a, b in zip(rep.ratios, rep.reference))
            measured[f"cauchy_err(c={c:g})"] = err
            passed = passed and err <= 1e-6
        ok = ok and passed
    return CriterionResult(3, "density tail ratio approaches 1", ok, measured)


@_timed
def criterion_4(cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Subordinator tail ratio within 2% at t = 1e3; nu = 1/2 closed form to 1e-5."""
    ts = [10.0, 100.0, 1000.0]
    measured = {}
    ok = True
    for nu, c in ((0.5, 2.0), (1.0, 2.5), (1.5, 2.0)):
        with warnings.catch_warnings():
            warnings.simplefilter("error", LossOfPrecisionWarning)
            rep = subordinator_tail_scan(nu, c, ts, cfg)
        dev = abs(rep.ratios[-1] - 1.0)
        measured[f"dev(nu={nu:g},c={c:g})"] = dev
        passed = dev <= 0.02
        if nu == 0.5:
            exact = [c / (2 * math.sqrt(math.pi)) * t ** -1.5 * math.exp(-c * c / (4 * t)) for t in ts]
            rel = max(abs(v / e - 1.0) for v, e in zip(rep.values, exact))
            measured["stable_rel_err"] = rel
            passed = passed and rel <= 1e-5
        ok = ok and passed
    return CriterionResult(4, "subordinator tail ratio approaches 1", ok, measured)


@_timed
def criterion_5(cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Subordinated and Fourier densities agree to 1e-5 on [0, 20]."""
    xs = np.linspace(0.0, 20.0, 81)
    worst = 0.0
    for nu, c in ROUTE_MATRIX:
        spec = _spec(nu, c)
        diff = np.max(np.abs(subordinated_density(spec, xs, cfg) - fourier_invert_density(spec, xs, cfg)))
        worst = max(worst, float(diff))
    return CriterionResult(5, "subordination and Fourier routes agree", worst <= 1e-5,
                           {"max_abs_diff": worst, "points": len(xs) * len(ROUTE_MATRIX)})


@_timed
def criterion_6():
    """Bessel-route kernel matches exp(-u) q_n(u) to 1e-10 relative for n <= 10."""
    worst = 0.0
    for n in range(11):
        q = bessel_q(n)
        for u in KERNEL_GRID:
            with gmpy2.context(gmpy2.get_context(), precision=200):
                ur = mpq(Fraction(u))
                qv = sum(mpq(a) * ur ** k for k, a in enumerate(q.coeffs))
                exact = float(gmpy2.exp(-mpfr(u)) * qv)
            for route in ("bessel", "auto"):
                got = char_kernel(n + 0.5, u, route=route)
                worst = max(worst, abs(got / exact - 1.0))
    return CriterionResult(6, "half-integer kernel equals exp(-u) q_n(u)", worst <= 1e-10,
                           {"max_rel_err": worst})


@_timed
def criterion_7(max_k: int = 10, max_n: int = 40):
    """alpha_k^(n) strictly increasing in n and at most 1/k! (exact)."""
    violations = 0
    for k in range(max_k + 1):
        bound = Fraction(1, math.factorial(k))
        prev = None
        for n in range(max(k, 0), max_n + 1):
            a = _alpha_row(n)[k]
            if a > bound:
                violations += 1
            if prev is not None and not a > prev:
                violations += 1
            prev = a
    return CriterionResult(7, "Bessel coefficients increase to 1/k!", violations == 0,
                           {"violations": violations, "alpha_10^(40)": float(bessel_alpha(40, 10)),
                            "1/10!": 1 / math.factorial(10)})


@_timed
def criterion_8(max_n: int = 40, u_max: int = 50, steps_per_unit: int = 8):
    """q_n(u) <= e**u on a rational grid of [0, 50], with e**u rounded down."""
    grid = [Fraction(i, steps_per_unit) for i in range(u_max * steps_per_unit + 1)]
    violations = 0
    largest = 0.0
    ctx = gmpy2.context(gmpy2.get_context(), precision=256, round=gmpy2.RoundDown)
    with ctx:
        lower = [gmpy2.exp(mpfr(mpq(u))) for u in grid]
    for n in range(max_n + 1):
        coeffs = [mpq(a) for a in _alpha_row(n)]
        for u, e_lo in zip(grid, lower):
            uq = mpq(u)
            qv = mpq(0)
            for a in reversed(coeffs):
                qv = qv * uq + a
            if u == 0:
                if qv != 1:
                    violations += 1
                continue
            if not qv <= e_lo:
                violations += 1
            largest = max(largest, float(mpfr(qv) / e_lo))
    return CriterionResult(8, "Bessel polynomial bounded by exp", violations == 0,
                           {"violations": violations, "points": len(grid) * (max_n + 1),
                            "max_q_over_exp": largest})


@_timed
def criterion_9(seeds=range(10), n: int = 200_000, moment_seed: int = 0, moment_n: int = 500_000):
    """KS vs Cauchy and the (1,1)-walk mixture; second moment for nu = 3/2."""
    mix = expand_product(ProductSpec((1, 1), (Fraction(1, 2), Fraction(1, 2))))
    fail_cauchy = 0
    fail_walk = 0
    for s in seeds:
        p1 = ks_test(sample_student(StudentParams(0.5), n, s), lambda x: student_cdf(0.5, x))[1]
        p2 = ks_test(sample_walk(WalkSpec((1, 1), (0.5, 0.5)), n, s), lambda x: mixture_cdf(mix, x))[1]
        fail_cauchy += p1 < 0.01
        fail_walk += p2 < 0.01
    m, se = second_moment(sample_student(StudentParams(1.5), moment_n, moment_seed))
    z = (m - 1.0) / se
    ok = fail_cauchy <= 1 and fail_walk <= 1 and abs(z) <= 3
    return CriterionResult(9, "sampler matches Cauchy, walk mixture and second moment", ok,
                           {"ks_fail_cauchy": int(fail_cauchy), "ks_fail_walk": int(fail_walk),
                            "second_moment": m, "z_score": z})


@_timed
def criterion_10(cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Total mass of the d = 1 density equals 1 to 1e-6."""
    worst = 0.0
    for nu, c in ROUTE_MATRIX:
        worst = max(worst, abs(total_mass(_spec(nu, c), cfg) - 1.0))
    return CriterionResult(10, "convolution density has unit mass", worst <= 1e-6,
                           {"max_abs_mass_error": worst})


@_timed
def carlitz_round_trip(max_n: int = 40):
    """Carlitz coefficients match their closed form and invert the Bessel basis."""
    bad = 0
    for n in range(max_n + 1):
        if carlitz_delta(n) != carlitz_delta_closed_form(n):
            bad += 1
        q = bessel_q(n)
        if bessel_to_monomial(monomial_to_bessel(q)) != q:
            bad += 1
    return CriterionResult(0, "Carlitz inversion round trip", bad == 0, {"mismatches": bad})


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
}

_CFG_AWARE = {3, 4, 5, 10}

SUITES = {
    "theorem1": (1, 9),
    "corollary": (2,),
    "theorem2": (3, 4, 5, 10),
    "lemmas": (6, 7, 8, "carlitz"),
    "all": (1, 2, 3, 4, 5, 6, 7, 8, 9, 10, "carlitz"),
}


def run_suite(name: str, cfg: QuadratureConfig = DEFAULT_CONFIG, echo=None) -> list:
    """Run every check of a suite and return the results in order."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    results = []
    for item in SUITES[name]:
        if item == "carlitz":
            res = carlitz_round_trip()
        elif item in _CFG_AWARE:
            res = CRITERIA[item](cfg=cfg)
        else:
            res = CRITERIA[item]()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results
