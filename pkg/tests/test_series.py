"""Truncated series arithmetic, calculus and order bookkeeping."""

from __future__ import annotations

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from quotseries.errors import DomainError, NonInvertible, TruncationError
from quotseries.rings import QQ, PolyRing
from quotseries.series import INF, TruncSeries, exp_series, polynomial

from conftest import q_series

small_rationals = st.builds(lambda n, d: mpq(n, d), st.integers(-5, 5), st.integers(1, 4))


@st.composite
def unit_series(draw, order=None):
    """Series with constant term 1 and small rational coefficients."""
    n = order or draw(st.integers(2, 12))
    tail = draw(st.lists(small_rationals, min_size=n - 1, max_size=n - 1))
    return TruncSeries.from_list(QQ, [mpq(1)] + tail, order=n)


@st.composite
def plain_series(draw, order=None):
    n = order or draw(st.integers(1, 12))
    vals = draw(st.lists(small_rationals, min_size=n, max_size=n))
    return TruncSeries.from_list(QQ, vals, order=n)


# ---------------------------------------------------------------- ring operations
def test_geometric_series_times_one_minus_q():
    geo = q_series([1, 1, 1, 1, 1], order=5)
    prod = polynomial([1, -1], var="q") * geo
    assert prod.order == 5
    assert prod.coeff_list(0, 5) == [1, 0, 0, 0, 0]


def test_inverse_of_one_minus_q():
    inv = q_series([1, -1], order=4).inverse()
    assert inv.order == 4
    assert inv.coeff_list(0, 4) == [1, 1, 1, 1]


def test_laurent_division_by_q():
    out = polynomial([0, 1, 1], var="q") / polynomial([0, 1], var="q")
    assert out == polynomial([1, 1], var="q")


def test_division_by_non_unit_lowest_coefficient():
    R = PolyRing(["x"])
    x = R.gen("x")
    s = TruncSeries(R, [R.one + x, R.one], order=3)
    with pytest.raises(NonInvertible):
        s.inverse()


def test_product_order_accounts_for_valuations():
    a = TruncSeries.from_list(QQ, [0, 1, 2], order=3)      # q + 2q^2 + O(q^3)
    b = TruncSeries.from_list(QQ, [0, 0, 1, 1], order=4)   # q^2 + q^3 + O(q^4)
    assert (a * b).order == min(3 + 2, 4 + 1)


# ---------------------------------------------------------------- exp and log
def test_exp_of_q():
    out = q_series([0, 1], order=4).exp()
    assert out.coeff_list(0, 4) == [1, 1, mpq(1, 2), mpq(1, 6)]


def test_log_of_geometric_series():
    out = q_series([1, -1], order=5).inverse().log()
    assert out.coeff_list(0, 5) == [0, 1, mpq(1, 2), mpq(1, 3), mpq(1, 4)]


def test_exp_of_harmonic_series_is_geometric():
    s = q_series([0] + [(1, k) for k in range(1, 4)], order=4)
    assert s.exp().coeff_list(0, 4) == [1, 1, 1, 1]


def test_exp_requires_zero_constant_term():
    with pytest.raises(DomainError):
        q_series([1, 1], order=3).exp()


def test_log_requires_constant_term_one():
    with pytest.raises(DomainError):
        q_series([2, 1], order=3).log()


# ---------------------------------------------------------------- formal powers
def test_pow_formal_negative_one_of_one_minus_q():
    out = q_series([1, -1], order=4).pow_formal(-1)
    assert out.coeff_list(0, 4) == [1, 1, 1, 1]


def test_pow_formal_zero_is_one():
    s = q_series([1, 3, -2, 5], order=4)
    assert s.pow_formal(0) == TruncSeries.constant(QQ, 1, order=4)


def test_square_root_of_one_plus_q():
    root = q_series([1, 1], order=3).pow_formal(mpq(1, 2))
    assert root.coeff_list(0, 3) == [1, mpq(1, 2), mpq(-1, 8)]
    assert root * root == q_series([1, 1, 0], order=3)


def test_pow_formal_needs_unit_constant():
    with pytest.raises(DomainError):
        q_series([0, 1], order=3).pow_formal(2)


def test_pow_formal_with_ring_exponent():
    R = PolyRing(["k"])
    k = R.gen("k")
    s = TruncSeries(R, [R.one, -R.one], order=3)
    out = s.pow_formal(-k)
    # (1 - q)^(-k) = 1 + k q + k(k+1)/2 q^2
    assert out.coeff(1) == k
    assert out.coeff(2) == (k * k + k) * mpq(1, 2)


# ---------------------------------------------------------------- composition
def test_compose_geometric_with_q_squared():
    f = TruncSeries.from_list(QQ, [1] * 6, order=6, var="z")
    out = f.compose(polynomial([0, 0, 1], var="q"))
    assert out.coeff_list(0, 6) == [1, 0, 1, 0, 1, 0]


def test_compose_identity():
    g = q_series([0, 2, -1, 3], order=4)
    assert polynomial([0, 1], var="z").compose(g) == g


def test_compose_exp_with_log_one_plus_q():
    log1p = q_series([0, 1, (-1, 2), (1, 3), (-1, 4), (1, 5)], order=6)
    out = exp_series(6).compose(log1p)
    assert out == q_series([1, 1, 0, 0, 0, 0], order=6)


def test_compose_requires_zero_constant_term():
    with pytest.raises(DomainError):
        q_series([1, 1], order=3).compose(q_series([1, 1], order=3))


# ---------------------------------------------------------------- coefficients
def test_coeff_of_geometric_series():
    assert q_series([1, -1], order=5).inverse().coeff(3) == 1


def test_residue():
    s = TruncSeries(QQ, {-1: 1, 0: 2, 1: 1}, var="z")
    assert s.residue() == 1


def test_coeff_beyond_order_is_an_error():
    s = q_series([1, 1, 1], order=3)
    with pytest.raises(TruncationError):
        s.coeff(3)


def test_coeff_below_support_is_zero():
    assert q_series([0, 0, 5], order=3).coeff(0) == 0


def test_exact_series_have_infinite_order():
    p = polynomial([1, 2])
    assert p.order == INF and p.coeff(100) == 0


def test_triples_are_exponent_numerator_denominator():
    s = q_series([(1, 2), 0, (-3, 4)], order=3)
    assert s.to_triples() == [[0, 1, 2], [2, -3, 4]]


def test_series_of_all_zeros_equals_zero_series():
    assert q_series([0, 0, 0], order=3) == TruncSeries(QQ, {}, order=3)


def test_arithmetic_never_extends_precision():
    a = q_series([1, 2, 3], order=3)
    b = q_series([1, 1, 1, 1, 1], order=5)
    assert (a + b).order == 3
    assert (a * b).order == 3
    assert (b / a).order == 3


# ---------------------------------------------------------------- properties
@settings(max_examples=40, deadline=None)
@given(unit_series())
def test_exp_log_roundtrip(s):
    assert s.log().exp() == s


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10).flatmap(lambda n: st.tuples(unit_series(n), unit_series(n))))
def test_log_of_product_is_sum_of_logs(pair):
    a, b = pair
    assert (a * b).log() == a.log() + b.log()


@settings(max_examples=40, deadline=None)
@given(unit_series(), small_rationals, small_rationals)
def test_pow_formal_adds_exponents(s, g1, g2):
    assert s.pow_formal(g1 + g2) == s.pow_formal(g1) * s.pow_formal(g2)


@settings(max_examples=30, deadline=None)
@given(unit_series(), st.integers(0, 4))
def test_pow_formal_integer_matches_repeated_product(s, k):
    prod = TruncSeries.constant(QQ, 1, order=s.order)
    for _ in range(k):
        prod = prod * s
    assert s.pow_formal(k) == prod


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(plain_series(n), plain_series(n), plain_series(n))))
def test_associativity_and_distributivity(triple):
    a, b, c = triple
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(plain_series(n), plain_series(n))))
def test_product_matches_double_loop(pair):
    a, b = pair
    n = a.order
    prod = a * b
    for k in range(n):
        brute = sum((a.coeff(i) * b.coeff(k - i) for i in range(k + 1)), mpq(0))
        assert prod.coeff(k) == brute


@settings(max_examples=30, deadline=None)
@given(unit_series())
def test_inverse_times_series_is_one(s):
    assert s * s.inverse() == TruncSeries.constant(QQ, 1, order=s.order)
