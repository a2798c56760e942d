from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from drx.exact import (
    PolynomialityError,
    RPolynomial,
    TSeries,
    bernoulli_number,
    bernoulli_polynomial,
    format_rational,
    interpolate_polynomial,
    parse_rational,
    series_coeff,
    series_exp,
    series_G,
    series_mul,
    series_S,
)


def bernoulli_by_division(n):
    """Oracle: invert (e^t - 1)/t as a power series."""
    e = [Fraction(1, factorial(k + 1)) for k in range(n + 1)]
    inv = [Fraction(1)]
    for k in range(1, n + 1):
        inv.append(-sum(e[j] * inv[k - j] for j in range(1, k + 1)))
    return [inv[k] * factorial(k) for k in range(n + 1)]


def test_bernoulli_examples():
    assert bernoulli_number(0) == 1
    assert bernoulli_number(2) == Fraction(1, 6)
    assert bernoulli_number(3) == 0


def test_bernoulli_matches_series_division():
    oracle = bernoulli_by_division(30)
    assert [bernoulli_number(m) for m in range(31)] == oracle


def test_bernoulli_polynomial_examples():
    assert bernoulli_polynomial(0, Fraction(7, 3)) == 1
    assert bernoulli_polynomial(1, Fraction(1, 2)) == 0
    assert bernoulli_polynomial(2, 0) == Fraction(1, 6)


@given(st.integers(0, 12), st.fractions(max_denominator=20).filter(lambda x: abs(x) < 10))
def test_bernoulli_polynomial_difference(k, x):
    # B_k(x+1) - B_k(x) = k x^{k-1}
    lhs = bernoulli_polynomial(k, x + 1) - bernoulli_polynomial(k, x)
    assert lhs == (k * x ** (k - 1) if k else 0)


def test_series_examples():
    S, G = series_S(10), series_G(10)
    assert series_coeff(S, 0) == 1
    assert series_coeff(S, 2) == Fraction(-1, 24)
    assert series_coeff(G, 2) == Fraction(-1, 24)
    assert series_coeff(S, 3) == 0
    assert series_exp(TSeries.constant(0, 5)) == TSeries.constant(1, 5)


def test_exp_G_is_S_through_40():
    for n in range(0, 41):
        assert series_exp(series_G(n)) == series_S(n)


def test_odd_binomial_sum():
    for n in range(51):
        lhs = sum(Fraction(1, factorial(2 * i + 1) * factorial(2 * (n - i) + 1)) for i in range(n + 1))
        assert lhs == Fraction(2 ** (2 * n + 1), factorial(2 * n + 2))


def test_series_coeff_beyond_order():
    with pytest.raises(IndexError):
        series_coeff(series_S(4), 5)


def test_series_exp_rejects_constant():
    with pytest.raises(ValueError, match="non-nilpotent"):
        series_exp(TSeries.constant(1, 3))


@given(st.lists(st.fractions(max_denominator=9), min_size=1, max_size=8))
def test_series_inverse(cs):
    cs = [Fraction(1) + abs(cs[0])] + cs[1:]
    s = TSeries(len(cs) - 1, cs)
    assert series_mul(s, s.inverse()) == TSeries.constant(1, s.order)


def test_interpolation_examples():
    assert interpolate_polynomial([(1, 1), (2, 4), (3, 9)], 2) == RPolynomial([0, 0, 1])
    assert interpolate_polynomial([(5, 7), (6, 7), (7, 7)], 2) == RPolynomial([7])
    samples = [(r, Fraction(r * (r - 1) * (r + 1), 6)) for r in range(4, 9)]
    p = interpolate_polynomial(samples, 3)
    assert p == RPolynomial([0, Fraction(-1, 6), 0, Fraction(1, 6)])
    assert p.constant_term == 0


def test_interpolation_held_out_failure():
    samples = [(r, r**3) for r in range(1, 6)]
    with pytest.raises(PolynomialityError, match="held-out"):
        interpolate_polynomial(samples, 2)


@given(st.lists(st.fractions(max_denominator=7), max_size=6), st.integers(-5, 20))
def test_interpolation_recovers_polynomial(cs, start):
    p = RPolynomial(cs)
    bound = max(len(cs) - 1, 0)
    samples = [(r, p(r)) for r in range(start, start + bound + 3)]
    assert interpolate_polynomial(samples, bound) == p


def test_shift_down():
    p = RPolynomial([0, 0, 3, 5])
    assert p.shift_down(2) == RPolynomial([3, 5])
    with pytest.raises(PolynomialityError):
        RPolynomial([1, 2]).shift_down(1)


@given(st.fractions(max_denominator=50))
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q

