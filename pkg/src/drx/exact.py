"""Exact arithmetic substrate: rationals, Bernoulli numbers, truncated series, interpolation.

Everything here works over :class:`fractions.Fraction`; there is no floating point
anywhere in the package.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Sequence

__all__ = [
    "Fraction",
    "PolynomialityError",
    "RPolynomial",
    "TSeries",
    "bernoulli_number",
    "bernoulli_polynomial",
    "format_rational",
    "interpolate_polynomial",
    "parse_rational",
    "series_G",
    "series_S",
    "series_coeff",
    "series_exp",
    "series_mul",
]


class PolynomialityError(ArithmeticError):
    """Held-out samples disagree with the interpolated polynomial."""

    def __init__(self, message: str, graph=None):
        super().__init__(message)
        self.graph = graph


def format_rational(q) -> str:
    q = Fraction(q)
    return str(q)


def parse_rational(s: str) -> Fraction:
    return Fraction(s)


# --- Bernoulli numbers -------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli_number(m: int) -> Fraction:
    """B_m from t/(e^t - 1), so B_1 = -1/2."""
    if m < 0:
        raise ValueError("Bernoulli index must be non-negative")
    if m < len(_BERNOULLI):
        return _BERNOULLI[m]
    with _BERNOULLI_LOCK:
        table = _BERNOULLI
        while len(table) <= m:
            k = len(table)
            s = sum(comb(k + 1, j) * table[j] for j in range(k))
            table.append(-s / (k + 1))
        return table[m]


def bernoulli_polynomial(k: int, x) -> Fraction:
    x = Fraction(x)
    return sum(
        (comb(k, j) * bernoulli_number(j) * x ** (k - j) for j in range(k + 1)),
        Fraction(0),
    )


# --- polynomials in r ---------------------------------------------------------


class RPolynomial:
    """Univariate polynomial in r with rational coefficients (index = power)."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable = ()):
        cs = [Fraction(c) for c in coefficients]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(cs)

    @property
    def degree(self) -> float | int:
        return len(self.coefficients) - 1 if self.coefficients else float("-inf")

    def __call__(self, r) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * r + c
        return acc

    def coefficient(self, k: int) -> Fraction:
        if 0 <= k < len(self.coefficients):
            return self.coefficients[k]
        return Fraction(0)

    @property
    def constant_term(self) -> Fraction:
        return self.coefficient(0)

    def shift_down(self, k: int) -> "RPolynomial":
        """Divide by r^k; the low coefficients must vanish."""
        if any(c != 0 for c in self.coefficients[:k]):
            raise PolynomialityError(f"polynomial not divisible by r^{k}")
        return RPolynomial(self.coefficients[k:])

    def __add__(self, other: "RPolynomial") -> "RPolynomial":
        n = max(len(self.coefficients), len(other.coefficients))
        return RPolynomial(self.coefficient(i) + other.coefficient(i) for i in range(n))

    def __mul__(self, other):
        if not isinstance(other, RPolynomial):
            return RPolynomial(c * Fraction(other) for c in self.coefficients)
        out = [Fraction(0)] * max(0, len(self.coefficients) + len(other.coefficients) - 1)
        for i, a in enumerate(self.coefficients):
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return RPolynomial(out)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, RPolynomial) and self.coefficients == other.coefficients

    def __hash__(self) -> int:
        return hash(self.coefficients)

    def __repr__(self) -> str:
        if not self.coefficients:
            return "RPolynomial(0)"
        parts = [f"({c})*r^{i}" for i, c in enumerate(self.coefficients) if c]
        return "RPolynomial(" + " + ".join(parts) + ")"


def interpolate_polynomial(samples: Sequence[tuple[int, Fraction]], degree_bound: int) -> RPolynomial:
    """Polynomial of degree <= degree_bound through the first degree_bound+1 samples.

    Any further samples are held out and checked against the result.
    """
    if len(samples) < degree_bound + 1:
        raise ValueError("need at least degree_bound + 1 samples")
    nodes = [Fraction(x) for x, _ in samples]
    if len(set(nodes)) != len(nodes):
        raise ValueError("interpolation nodes must be distinct")
    fit = [(Fraction(x), Fraction(y)) for x, y in samples[: degree_bound + 1]]
    xs = [x for x, _ in fit]
    # Newton divided differences
    dd = [y for _, y in fit]
    m = len(dd)
    for j in range(1, m):
        for i in range(m - 1, j - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - j])
    poly = RPolynomial([dd[-1]]) if dd else RPolynomial()
    for i in range(m - 2, -1, -1):
        poly = poly * RPolynomial([-xs[i], 1]) + RPolynomial([dd[i]])
    for x, y in samples[degree_bound + 1 :]:
        if poly(x) != Fraction(y):
            raise PolynomialityError(
                f"polynomiality violated at held-out node r={x}: "
                f"interpolated {poly(x)}, sampled {Fraction(y)}"
            )
    return poly


# --- truncated power series in t ---------------------------------------------


@dataclass(frozen=True)
class TSeries:
    """Dense power series in t truncated after t^order."""

    order: int
    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        if self.order < 0:
            raise ValueError("truncation order must be non-negative")
        cs = tuple(Fraction(c) for c in self.coefficients[: self.order + 1])
        cs = cs + (Fraction(0),) * (self.order + 1 - len(cs))
        object.__setattr__(self, "coefficients", cs)

    @classmethod
    def constant(cls, c, order: int) -> "TSeries":
        return cls(order, (Fraction(c),))

    def __getitem__(self, k: int) -> Fraction:
        return series_coeff(self, k)

    def __add__(self, other: "TSeries") -> "TSeries":
        n = min(self.order, other.order)
        return TSeries(n, [a + b for a, b in zip(self.coefficients[: n + 1], other.coefficients)])

    def __neg__(self) -> "TSeries":
        return TSeries(self.order, [-c for c in self.coefficients])

    def __sub__(self, other: "TSeries") -> "TSeries":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TSeries):
            return series_mul(self, other)
        c = Fraction(other)
        return TSeries(self.order, [c * a for a in self.coefficients])

    __rmul__ = __mul__

    def scale_argument(self, a) -> "TSeries":
        """f(t) -> f(a t)."""
        a = Fraction(a)
        return TSeries(self.order, [c * a**k for k, c in enumerate(self.coefficients)])

    def inverse(self) -> "TSeries":
        c0 = self.coefficients[0]
        if c0 == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        out = [Fraction(1) / c0]
        for k in range(1, self.order + 1):
            s = sum(self.coefficients[j] * out[k - j] for j in range(1, k + 1))
            out.append(-s / c0)
        return TSeries(self.order, out)


def series_mul(a: TSeries, b: TSeries) -> TSeries:
    n = min(a.order, b.order)
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a.coefficients[: n + 1]):
        if x:
            for j in range(n + 1 - i):
                out[i + j] += x * b.coefficients[j]
    return TSeries(n, out)


def series_coeff(s: TSeries, k: int) -> Fraction:
    if k < 0:
        return Fraction(0)
    if k > s.order:
        raise IndexError(f"coefficient t^{k} lies beyond truncation order {s.order}")
    return s.coefficients[k]


def series_exp(s: TSeries) -> TSeries:
    if s.coefficients[0] != 0:
        raise ValueError("non-nilpotent exponent")
    # f = exp(g) satisfies n f_n = sum_k k g_k f_{n-k}
    f = [Fraction(1)]
    g = s.coefficients
    for n in range(1, s.order + 1):
        f.append(sum(k * g[k] * f[n - k] for k in range(1, n + 1)) / n)
    return TSeries(s.order, f)


def series_S(order: int) -> TSeries:
    """sin(t/2)/(t/2)."""
    cs = [Fraction(0)] * (order + 1)
    for b in range(order // 2 + 1):
        cs[2 * b] = Fraction((-1) ** b, factorial(2 * b + 1) * 4**b)
    return TSeries(order, cs)


def series_G(order: int) -> TSeries:
    """sum_{c>=1} (-1)^c B_{2c}/(2c) t^{2c}/(2c)!, the logarithm of series_S."""
    cs = [Fraction(0)] * (order + 1)
    for c in range(1, order // 2 + 1):
        cs[2 * c] = (-1) ** c * bernoulli_number(2 * c) / (2 * c) / factorial(2 * c)
    return TSeries(order, cs)
