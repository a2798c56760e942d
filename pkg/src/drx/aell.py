"""Reduced rubber invariants of the A_ell resolution against the DR cycle.

Two evaluations are provided: a direct sum over one-vertex graphs with k
self-loops using Maulik's vertex formula, and the closed series form.  The
equivariant weights never appear; only reduced quantities are computed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, prod
from typing import Sequence

from .exact import TSeries, bernoulli_number, series_coeff, series_mul, series_S


class UnstableInsertionError(ValueError):
    pass


@lru_cache(maxsize=None)
def cartan_matrix(ell: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(-2 if i == j else (1 if abs(i - j) == 1 else 0) for j in range(ell)) for i in range(ell)
    )


def invert_matrix(m) -> tuple[tuple[Fraction, ...], ...]:
    """Gauss-Jordan inverse over the rationals."""
    size = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(size)] for i, row in enumerate(m)]
    for col in range(size):
        pivot = next(r for r in range(col, size) if a[r][col] != 0)
        a[col], a[pivot] = a[pivot], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for r in range(size):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[size:]) for row in a)


@lru_cache(maxsize=None)
def _cartan_inverse(ell: int):
    return invert_matrix(cartan_matrix(ell))


def positive_roots(ell: int) -> list[tuple[int, ...]]:
    """e_i + ... + e_j in simple-root coordinates."""
    return [tuple(int(i <= k <= j) for k in range(ell)) for i in range(ell) for j in range(i, ell)]


@dataclass(frozen=True)
class AellData:
    ell: int
    alpha: tuple[int, ...]

    def __post_init__(self):
        if self.ell < 1 or len(self.alpha) != self.ell:
            raise ValueError("alpha must have ell coordinates")

    @property
    def cartan(self):
        return cartan_matrix(self.ell)

    @property
    def cartan_inverse(self):
        return _cartan_inverse(self.ell)

    def pair_curve(self, x: Sequence[int], y: Sequence[int]) -> int:
        """Intersection of two curve classes in simple-root coordinates."""
        C = self.cartan
        return sum(x[i] * C[i][j] * y[j] for i in range(self.ell) for j in range(self.ell))

    def pair_exceptional(self, mu: int) -> int:
        """(alpha, E_mu) for the exceptional curve E_mu viewed as a divisor."""
        return sum(self.cartan[mu][j] * self.alpha[j] for j in range(self.ell))

    def pair_divisor(self, omega: Sequence) -> Fraction:
        """(alpha, omega) for omega written in the basis dual to the simple roots."""
        return sum((Fraction(o) * a for o, a in zip(omega, self.alpha)), Fraction(0))

    def simple_root_dual(self, mu: int) -> tuple[int, ...]:
        return tuple(int(i == mu) for i in range(self.ell))

    def self_pairing_via_inverse(self) -> Fraction:
        """sum_{mu,nu} (alpha,E_mu) (C^{-1})^{mu nu} (alpha,E_nu); equals (alpha, alpha)."""
        Ci = self.cartan_inverse
        p = [self.pair_exceptional(m) for m in range(self.ell)]
        return sum((p[m] * Ci[m][k] * p[k] for m in range(self.ell) for k in range(self.ell)), Fraction(0))

    def is_root(self) -> bool:
        return self.pair_curve(self.alpha, self.alpha) == -2


def _falling_ratio(top: int, q: int) -> Fraction:
    """(top + q)! / top! extended to all integers top as prod_{i=1}^q (top + i)."""
    return Fraction(prod(top + i for i in range(1, q + 1)))


@lru_cache(maxsize=None)
def _maulik_cached(g, d, pairings, b, c):
    p, q = len(b), len(c)
    if sum(b) + sum(c) != g + q:
        return Fraction(0)
    base = 2 * g + p - 3
    if q > 0 and base < 0:
        raise UnstableInsertionError("unstable insertion pattern")
    val = _falling_ratio(base, q) * Fraction(d) ** base
    for bi, x in zip(b, pairings):
        val *= Fraction(factorial(bi), factorial(2 * bi + 1)) * Fraction(-1, 2) ** bi * x
    for cj in c:
        val *= Fraction(factorial(cj - 1), factorial(2 * cj - 1)) * Fraction(-1, 2) ** (cj - 1)
    return val


def maulik_invariant(g: int, d: int, pairings: Sequence, b: Sequence[int], c: Sequence[int] = ()) -> Fraction:
    """Reduced invariant with descendants of divisors (pairings with alpha given) and of 1.

    When no descendants of 1 are present the factorial ratio is the empty
    product, and d^{2g+p-3} is taken as a rational power, so unstable ranges
    (g = 0 with p <= 2) evaluate by the same expression.
    """
    if d < 1:
        raise ValueError("d must be positive")
    if len(pairings) != len(b):
        raise ValueError("one pairing per divisor insertion")
    if any(x < 0 for x in b) or any(x <= 0 for x in c):
        raise ValueError("need b_i >= 0 and c_j > 0")
    return _maulik_cached(g, d, tuple(Fraction(x) for x in pairings), tuple(b), tuple(c))


def _compositions(total: int, parts: int):
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def reduced_dr_invariant_graphsum(data: AellData, g: int, d: int, A: Sequence[int], omegas) -> Fraction:
    """Sum over k self-loops at a single vertex of Maulik invariants at genus g - k."""
    A = tuple(A)
    if len(omegas) != len(A):
        raise ValueError("one divisor per marking")
    if d < 1 or not data.is_root():
        return Fraction(0)
    # the sum is symmetric in the markings and sees a_i only through a_i^2
    legs = tuple(sorted((a * a, data.pair_divisor(w)) for a, w in zip(A, omegas)))
    return _graphsum(data.ell, data.alpha, g, d, legs)


@lru_cache(maxsize=None)
def _graphsum(ell: int, alpha: tuple[int, ...], g: int, d: int, legs) -> Fraction:
    data = AellData(ell, alpha)
    Ci = data.cartan_inverse
    n = len(legs)
    p_leg = tuple(p for _, p in legs)
    p_exc = [Fraction(data.pair_exceptional(m)) for m in range(ell)]
    total = Fraction(0)
    for k in range(0, g + 1):
        gk = g - k
        pref_k = Fraction(1, 2**k * factorial(k))
        # leg descendants b_i and loop-branch descendants (c'_j, c''_j) share the budget g - k
        for split in _compositions(gk, n + 2 * k):
            b = split[:n]
            loops = [(split[n + 2 * j], split[n + 2 * j + 1]) for j in range(k)]
            leg_part = Fraction(1)
            for (a2, _), bi in zip(legs, b):
                leg_part *= Fraction(a2, 2) ** bi / factorial(bi)
            if not leg_part:
                continue
            loop_part = Fraction(1)
            for c1, c2 in loops:
                c = c1 + c2 + 1
                loop_part *= (
                    -bernoulli_number(2 * c) / (2 * c)
                    * Fraction(1, 2**c1 * factorial(c1))
                    * Fraction(1, 2**c2 * factorial(c2))
                )
            insert_b = tuple(b) + tuple(x for pair in loops for x in pair)
            for mus in itertools.product(range(ell), repeat=2 * k):
                cinv = prod((Ci[mus[2 * j]][mus[2 * j + 1]] for j in range(k)), start=Fraction(1))
                if not cinv:
                    continue
                pairings = p_leg + tuple(p_exc[m] for m in mus)
                total += pref_k * leg_part * loop_part * cinv * maulik_invariant(gk, d, pairings, insert_b)
    return total


def reduced_dr_invariant_closed(data: AellData, g: int, d: int, A: Sequence[int], omegas) -> Fraction:
    """d^{2g+n-3} prod (alpha, omega_i) [t^{2g}] prod S(a_i t) / S(t)^2."""
    n = len(A)
    if len(omegas) != n:
        raise ValueError("one divisor per marking")
    if d < 1 or not data.is_root():
        return Fraction(0)
    pre = Fraction(d) ** (2 * g + n - 3) * prod((data.pair_divisor(w) for w in omegas), start=Fraction(1))
    return pre * _ratio_coefficient(g, tuple(sorted(A)))


@lru_cache(maxsize=None)
def _ratio_coefficient(g: int, A: tuple[int, ...]) -> Fraction:
    order = 2 * g
    num = TSeries.constant(1, order)
    for a in A:
        num = series_mul(num, _scaled_S(order, a))
    return series_coeff(series_mul(num, _inverse_S_squared(order)), order)


@lru_cache(maxsize=None)
def _scaled_S(order: int, a: int) -> TSeries:
    return series_S(order).scale_argument(a)


@lru_cache(maxsize=None)
def _inverse_S_squared(order: int) -> TSeries:
    S = series_S(order)
    return series_mul(S, S).inverse()
