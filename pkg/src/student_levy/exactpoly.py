"""Exact rational arithmetic for Bessel polynomials and Bessel-basis mixtures.

The n'th Bessel polynomial is normalised as ``q_n(0) = 1`` so that
``k_{n+1/2}(u) = exp(-u) q_n(u)``.  Products ``q_{n_1}(a_1 u) ... q_{n_N}(a_N u)``
with positive weights summing to one expand in the basis ``{q_j}`` with
nonnegative coefficients; :func:`expand_product` computes them exactly.

Public values are :class:`fractions.Fraction`.  The inner loops run on
``gmpy2.mpq`` which is an order of magnitude faster for the digit counts
that appear here (hundreds of digits for five factors of degree eight).
"""
from __future__ import annotations

import csv
import functools
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from gmpy2 import mpq

__all__ = [
    "RationalPoly",
    "BesselMixture",
    "ProductSpec",
    "bessel_alpha",
    "bessel_q",
    "carlitz_delta",
    "carlitz_delta_closed_form",
    "monomial_to_bessel",
    "bessel_to_monomial",
    "expand_product",
    "expand_product_float",
    "corollary_beta_min",
    "mixture_charfn_partial",
    "parse_rational",
]


def _to_fraction(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def _to_mpq(r) -> mpq:
    r = Fraction(r)
    return mpq(r.numerator, r.denominator)


def parse_rational(text) -> Fraction:
    """Parse ``"num/den"``, an integer, or a decimal string into a Fraction.

    Floats are rejected; their binary value is almost never what was meant.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("pass rationals as strings or Fractions, not floats")
    return Fraction(str(text).strip())


@dataclass(frozen=True)
class RationalPoly:
    """Dense polynomial with Fraction coefficients, lowest degree first.

    Trailing zeros are trimmed, so the zero polynomial has no coefficients.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        cs = [Fraction(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, u):
        acc = Fraction(0) if isinstance(u, (int, Fraction)) else 0.0
        for c in reversed(self.coeffs):
            acc = acc * u + (c if isinstance(acc, Fraction) else float(c))
        return acc

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + other.scale(-1)

    def __mul__(self, other: "RationalPoly") -> "RationalPoly":
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(tuple(out))

    def scale(self, factor) -> "RationalPoly":
        factor = Fraction(factor)
        return RationalPoly(tuple(c * factor for c in self.coeffs))

    def compose_scale(self, a) -> "RationalPoly":
        """Return the polynomial ``u -> p(a u)``."""
        a = Fraction(a)
        return RationalPoly(tuple(c * a**k for k, c in enumerate(self.coeffs)))

    def __eq__(self, other):
        if not isinstance(other, RationalPoly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*u^{k}" for k, c in enumerate(self.coeffs) if c]
        return "RationalPoly(" + (" + ".join(terms) or "0") + ")"


# ---------------------------------------------------------------------------
# Bessel polynomial coefficients


def _check_index(name, value):
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")


@functools.lru_cache(maxsize=None)
def _alpha_row(n: int) -> tuple[mpq, ...]:
    # alpha_{k+1} / alpha_k = 2 (n - k) / ((2n - k)(k + 1))
    row = [mpq(1)]
    for k in range(n):
        row.append(row[-1] * mpq(2 * (n - k), (2 * n - k) * (k + 1)))
    return tuple(row)


def bessel_alpha(n: int, k: int) -> Fraction:
    """Coefficient of ``u**k`` in q_n: ``(-n)_k 2^k / ((-2n)_k k!)``."""
    _check_index("n", n)
    _check_index("k", k)
    if k > n:
        raise ValueError(f"k={k} exceeds the degree n={n}")
    return _to_fraction(_alpha_row(n)[k])


def bessel_q(n: int) -> RationalPoly:
    """The n'th Bessel polynomial q_n with q_n(0) = 1."""
    _check_index("n", n)
    return RationalPoly(tuple(_to_fraction(a) for a in _alpha_row(n)))


# ---------------------------------------------------------------------------
# Change of basis u^n <-> {q_j}


@functools.lru_cache(maxsize=None)
def _delta_row(n: int) -> tuple[mpq, ...]:
    """delta_j^(n), j = 0..n, from the triangular system u^n = sum_j delta_j q_j."""
    rem = [mpq(0)] * (n + 1)
    rem[n] = mpq(1)
    delta = [mpq(0)] * (n + 1)
    for j in range(n, -1, -1):
        if rem[j]:
            row = _alpha_row(j)
            dj = rem[j] / row[j]
            delta[j] = dj
            for k in range(j + 1):
                rem[k] -= dj * row[k]
    return tuple(delta)


def carlitz_delta(n: int) -> tuple[Fraction, ...]:
    """Coefficients ``delta_0..delta_n`` with ``u**n = sum_j delta_j q_j(u)``."""
    _check_index("n", n)
    return tuple(_to_fraction(d) for d in _delta_row(n))


def carlitz_delta_closed_form(n: int) -> tuple[Fraction, ...]:
    """Carlitz's explicit formula for the same coefficients.

    Kept as an independent cross-check of :func:`carlitz_delta`.
    """
    _check_index("n", n)
    out = []
    f = math.factorial
    for j in range(n + 1):
        if 2 * j < n - 1:
            out.append(Fraction(0))
            continue
        num = f(n + 1) * (-1) ** (n - j) * f(2 * j)
        den = 2**n * f(n - j) * f(j) * f(2 * j + 1 - n)
        out.append(Fraction(num, den))
    return tuple(out)


def _monomial_to_bessel_mpq(coeffs: Sequence[mpq]) -> list[mpq]:
    out = [mpq(0)] * len(coeffs)
    for k, ck in enumerate(coeffs):
        if not ck:
            continue
        row = _delta_row(k)
        # delta_j^(k) vanishes for 2j < k - 1
        for j in range(k // 2, k + 1):
            dj = row[j]
            if dj:
                out[j] += ck * dj
    return out


def monomial_to_bessel(p: RationalPoly) -> tuple[Fraction, ...]:
    """Coefficients ``c_j`` with ``p(u) = sum_j c_j q_j(u)``."""
    cs = _monomial_to_bessel_mpq([_to_mpq(c) for c in p.coeffs])
    while cs and cs[-1] == 0:
        cs.pop()
    return tuple(_to_fraction(c) for c in cs)


def bessel_to_monomial(coeffs: Sequence) -> RationalPoly:
    """Inverse of :func:`monomial_to_bessel`."""
    n = len(coeffs)
    out = [mpq(0)] * n
    for j, cj in enumerate(coeffs):
        cj = _to_mpq(cj)
        if not cj:
            continue
        for k, a in enumerate(_alpha_row(j)):
            out[k] += cj * a
    return RationalPoly(tuple(_to_fraction(c) for c in out))


# ---------------------------------------------------------------------------
# Mixtures


@dataclass(frozen=True)
class BesselMixture:
    """Finite mixture ``sum_j weights[j] f_{j+1/2}``.

    In exact mode the weights are Fractions; in float mode they are floats
    and ``error_bound`` bounds ``|float weight - exact weight|`` for the
    normalised binary input weights.
    """

    weights: Mapping[int, object]
    exact: bool = True
    error_bound: float = 0.0

    def __post_init__(self):
        w = {int(j): (Fraction(v) if self.exact else float(v)) for j, v in self.weights.items()}
        object.__setattr__(self, "weights", dict(sorted(w.items())))

    @property
    def support(self) -> tuple[int, int]:
        nz = [j for j, v in self.weights.items() if v != 0]
        if not nz:
            raise ValueError("empty mixture")
        return min(nz), max(nz)

    def total(self):
        return sum(self.weights.values(), Fraction(0) if self.exact else 0.0)

    def is_convex(self) -> bool:
        return all(v >= 0 for v in self.weights.values()) and self.total() == 1

    def float_weights(self) -> dict[int, float]:
        return {j: float(v) for j, v in self.weights.items()}

    def to_json(self) -> str:
        if self.exact:
            payload = {"weights": {str(j): f"{v.numerator}/{v.denominator}" for j, v in self.weights.items()}}
        else:
            payload = {
                "weights": {str(j): repr(v) for j, v in self.weights.items()},
                "error_bound": self.error_bound,
            }
        return json.dumps(payload, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "BesselMixture":
        data = json.loads(text)
        raw = data["weights"]
        if "error_bound" in data:
            return cls({int(j): float(v) for j, v in raw.items()}, exact=False,
                       error_bound=float(data["error_bound"]))
        return cls({int(j): Fraction(v) for j, v in raw.items()})

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["j", "numerator", "denominator", "float_value"])
        for j, v in self.weights.items():
            if self.exact:
                writer.writerow([j, v.numerator, v.denominator, repr(float(v))])
            else:
                fr = Fraction(v)
                writer.writerow([j, fr.numerator, fr.denominator, repr(v)])
        return buf.getvalue()


@dataclass(frozen=True)
class ProductSpec:
    """Degrees ``n_1..n_N`` and positive weights ``a_1..a_N`` summing to one."""

    degrees: tuple[int, ...]
    weights: tuple[Fraction, ...] = field(default=())

    def __post_init__(self):
        degrees = tuple(self.degrees)
        for n in degrees:
            _check_index("degree", n)
        if not degrees:
            raise ValueError("at least one factor is required")
        weights = tuple(parse_rational(a) for a in self.weights) if self.weights else (Fraction(1),)
        if len(weights) != len(degrees):
            raise ValueError("degrees and weights differ in length")
        if any(a <= 0 for a in weights):
            raise ValueError("weights must be positive")
        if sum(weights) != 1:
            raise ValueError("weights must sum to 1")
        object.__setattr__(self, "degrees", degrees)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def equal(cls, n: int, N: int) -> "ProductSpec":
        return cls((n,) * N, (Fraction(1, N),) * N)


def _product_coeffs(degrees: Sequence[int], weights: Sequence[mpq]) -> list[mpq]:
    prod = [mpq(1)]
    for n, a in zip(degrees, weights):
        row = _alpha_row(n)
        scaled = []
        p = mpq(1)
        for alpha in row:
            scaled.append(alpha * p)
            p *= a
        out = [mpq(0)] * (len(prod) + n)
        for i, x in enumerate(prod):
            for k, y in enumerate(scaled):
                out[i + k] += x * y
        prod = out
    return prod


def expand_product_raw(degrees: Sequence[int], weights: Sequence[mpq]) -> list[mpq]:
    """Bessel-basis coefficients of ``prod_i q_{n_i}(a_i u)`` as mpq, index 0..sum(n).

    No validation; used by the exhaustive verification scans.
    """
    return _monomial_to_bessel_mpq(_product_coeffs(degrees, weights))


def expand_product(spec: ProductSpec) -> BesselMixture:
    """Exact mixture weights ``beta_j`` of ``prod_i q_{n_i}(a_i u) = sum_j beta_j q_j(u)``."""
    beta = expand_product_raw(spec.degrees, [_to_mpq(a) for a in spec.weights])
    return BesselMixture({j: _to_fraction(b) for j, b in enumerate(beta) if b != 0})


def expand_product_float(degrees: Sequence[int], weights: Sequence[float], tol: float = 1e-12) -> BesselMixture:
    """Float-weight variant of :func:`expand_product`.

    The binary values of ``weights`` are normalised exactly to sum one (the
    input sum must be within ``tol`` of one), the expansion is carried out
    in exact arithmetic, and the result is rounded to floats.  The reported
    ``error_bound`` is the exact maximum rounding error of that last step.
    """
    ws = [Fraction(float(w)) for w in weights]
    if any(w <= 0 for w in ws):
        raise ValueError("weights must be positive")
    total = sum(ws)
    if abs(total - 1) > Fraction(tol):
        raise ValueError("weights must sum to 1")
    ws = [w / total for w in ws]
    beta = expand_product_raw(list(degrees), [_to_mpq(w) for w in ws])
    out = {}
    bound = Fraction(0)
    for j, b in enumerate(beta):
        if b == 0:
            continue
        exact = _to_fraction(b)
        fl = float(exact)
        out[j] = fl
        bound = max(bound, abs(Fraction(fl) - exact))
    return BesselMixture(out, exact=False, error_bound=float(bound) if bound else 0.0)


def corollary_beta_min(n: int, N: int) -> Fraction:
    """Lowest mixture weight for N equal steps of degree n: ``1 / N**(2n)``.

    The closed form is checked against :func:`expand_product` before returning.
    """
    _check_index("n", n)
    if not isinstance(N, int) or N < 1:
        raise ValueError("N must be a positive integer")
    value = Fraction(1, N ** (2 * n))
    mix = expand_product(ProductSpec.equal(n, N))
    got = mix.weights.get(n, Fraction(0))
    if got != value:
        raise ArithmeticError(f"expansion gives beta_{n} = {got}, expected {value}")
    return value


def mixture_charfn_partial(mix: BesselMixture, scale: float, u: float) -> float:
    """``sum_j beta_j exp(-scale u) q_j(scale u)`` in floating point."""
    if u < 0:
        raise ValueError("u must be non-negative")
    if scale <= 0:
        raise ValueError("scale must be positive")
    z = scale * u
    total = 0.0
    for j, b in mix.weights.items():
        qj = 0.0
        for a in reversed(_alpha_row(j)):
            qj = qj * z + float(a)
        total += float(b) * qj
    return math.exp(-z) * total
