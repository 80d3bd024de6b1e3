"""Lagrange-inversion fast path against the Puiseux oracle, the G_e identity, U_e and MacMahon."""

from __future__ import annotations

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from quotseries.cyclo import CycloField
from quotseries.lagrange import (branch_product, branch_sum, g_lhs, g_rhs, macmahon, prod_H_over_q_log,
                                 sigma2, u_transform)
from quotseries.puiseux import branch_sum_direct, unit_product_log_direct
from quotseries.rings import QQ
from quotseries.series import TruncSeries, polynomial

from conftest import q_series

Z = sympy.symbols("z")
QS = sympy.symbols("q")


@st.composite
def normalized_Q(draw, max_degree=4):
    tail = draw(st.lists(st.integers(-3, 3), min_size=1, max_size=max_degree))
    return polynomial([1] + tail)


@st.composite
def laurent_phi(draw):
    coeffs = draw(st.dictionaries(st.integers(-2, 4), st.integers(-3, 3), min_size=1, max_size=5))
    return TruncSeries(QQ, coeffs, var="z")


@st.composite
def unit_t_series(draw, order=8):
    tail = draw(st.lists(st.integers(-3, 3), min_size=order - 1, max_size=order - 1))
    return TruncSeries.from_list(QQ, [1] + tail, order=order, var="t")


def _to_sympy(poly: TruncSeries):
    return sum(sympy.Rational(int(c.numerator), int(c.denominator)) * Z**k for k, c in poly.items())


def brute_force_g(Q_expr, e, N):
    """Expand the defining double sum of ``G_e`` with sympy and exponentiate."""
    total = 0
    for n in range(1, N):
        for m in range(1, N - n):
            Pn = sympy.Poly(sympy.expand(Q_expr**n), Z)
            Pm = sympy.Poly(sympy.expand(Q_expr**m), Z)
            for j in range(1, n * e + 1):
                total += sympy.Rational(j, n * m) * Pm.coeff_monomial(Z**(m * e + j)) * \
                    Pn.coeff_monomial(Z**(n * e - j)) * QS**(n + m)
    expanded = sympy.series(sympy.exp(-total), QS, 0, N).removeO()
    return [sympy.Poly(expanded, QS).coeff_monomial(QS**k) for k in range(N)]


def _as_list(s: TruncSeries, N: int):
    return [sympy.Rational(int(c.numerator), int(c.denominator)) for c in s.coeff_list(0, N)]


# ---------------------------------------------------------------- branch sums
def test_branch_sum_of_identity_for_one_plus_z():
    phi = polynomial([0, 1])
    out = branch_sum(polynomial([1, 1]), phi, 1, 6)
    assert out.coeff_list(0, 6) == [0, 1, 1, 1, 1, 1]
    assert out == branch_sum_direct(polynomial([1, 1]), phi, 1, 6)


@pytest.mark.parametrize("e", [2, 3, 4])
def test_branch_sum_of_identity_for_constant_Q(e):
    assert branch_sum(polynomial([1]), polynomial([0, 1]), e, 6).is_zero()


def test_branch_sum_of_identity_for_constant_Q_and_e1():
    # the single branch is H = q itself, so the sum of roots of unity argument does not apply
    out = branch_sum(polynomial([1]), polynomial([0, 1]), 1, 6)
    assert out == TruncSeries(QQ, {1: 1}, order=6)


@pytest.mark.parametrize("e", [1, 2, 3])
def test_branch_sum_of_constant_is_e(e):
    out = branch_sum(polynomial([1, 2, -1]), polynomial([1]), e, 5)
    assert out == TruncSeries.constant(QQ, e, order=5)


def test_log_product_for_constant_Q_vanishes():
    assert prod_H_over_q_log(polynomial([1]), 3, 6).is_zero()


def test_log_product_for_one_plus_z():
    out = prod_H_over_q_log(polynomial([1, 1]), 1, 5)
    assert out.coeff_list(0, 5) == [0, 1, mpq(1, 2), mpq(1, 3), mpq(1, 4)]


def test_log_product_for_one_plus_z_squared():
    # H/q = 1 + 2q + 5q^2 + 14q^3 (Catalan numbers), whose log starts 2q + 3q^2 + (20/3)q^3
    catalan = q_series([1, 2, 5, 14], order=4)
    out = prod_H_over_q_log(polynomial([1, 2, 1]), 1, 4)
    assert out == catalan.log()
    assert out.coeff_list(0, 4) == [0, 2, 3, mpq(20, 3)]
    assert out == unit_product_log_direct(polynomial([1, 2, 1]), 1, 4)


# ---------------------------------------------------------------- branch products
def test_branch_product_of_trivial_genus():
    out = branch_product(polynomial([1, 1, 2]), polynomial([1], var="z"), 2, 6)
    assert out == TruncSeries.constant(QQ, 1, order=6)


def test_branch_product_with_constant_genus():
    out = branch_product(polynomial([1, -1, 3]), polynomial([5], var="z"), 3, 5)
    assert out == TruncSeries.constant(QQ, 1, order=5)


def test_branch_product_one_plus_h():
    out = branch_product(polynomial([1, 1]), polynomial([1, 1], var="z"), 1, 6)
    assert out.coeff_list(0, 6) == [1] * 6


# ---------------------------------------------------------------- G_e identity
def test_g_lhs_for_one_plus_z():
    assert g_lhs(polynomial([1, 1]), 1, 6) == TruncSeries.constant(QQ, 1, order=6)


def test_g_lhs_for_one_plus_z_squared():
    out = g_lhs(polynomial([1, 2, 1]), 1, 4)
    assert _as_list(out, 4) == brute_force_g((1 + Z)**2, 1, 4) == [1, 0, -1, -4]


def test_g_lhs_for_constant_Q():
    assert g_lhs(polynomial([1]), 2, 6) == TruncSeries.constant(QQ, 1, order=6)


def test_g_rhs_for_one_plus_z():
    assert g_rhs(polynomial([1, 1]), 1, 6) == TruncSeries.constant(QQ, 1, order=6)


def test_g_rhs_for_one_plus_z_squared_matches_lhs():
    Q = polynomial([1, 2, 1])
    assert g_rhs(Q, 1, 6) == g_lhs(Q, 1, 6)


def test_g_rhs_for_constant_Q():
    assert g_rhs(polynomial([1]), 2, 5) == TruncSeries.constant(QQ, 1, order=5)


@pytest.mark.parametrize("coeffs,e", [([1, -1, 2], 2), ([1, 3, 0, -2], 3), ([1, 1, 1], 2)])
def test_g_lhs_matches_brute_force(coeffs, e):
    Q = polynomial(coeffs)
    assert _as_list(g_lhs(Q, e, 5), 5) == brute_force_g(_to_sympy(Q), e, 5)


@settings(max_examples=15, deadline=None)
@given(normalized_Q(), st.integers(1, 3))
def test_g_identity(Q, e):
    assert g_lhs(Q, e, 6) == g_rhs(Q, e, 6)


# ---------------------------------------------------------------- oracle equivalence
@settings(max_examples=15, deadline=None)
@given(normalized_Q(), laurent_phi(), st.integers(1, 4))
def test_branch_sum_matches_puiseux(Q, phi, e):
    assert branch_sum(Q, phi, e, 7) == branch_sum_direct(Q, phi, e, 7)


@settings(max_examples=15, deadline=None)
@given(normalized_Q(), st.integers(1, 4))
def test_log_product_matches_puiseux(Q, e):
    assert prod_H_over_q_log(Q, e, 7) == unit_product_log_direct(Q, e, 7)


@settings(max_examples=15, deadline=None)
@given(normalized_Q(), normalized_Q(), normalized_Q(), st.integers(1, 3))
def test_branch_product_is_multiplicative(Q, f1, f2, e):
    f1, f2 = f1.rename("z"), f2.rename("z")
    assert branch_product(Q, f1 * f2, e, 6) == branch_product(Q, f1, e, 6) * branch_product(Q, f2, e, 6)


# ---------------------------------------------------------------- universal transform
def test_u_transform_of_one_minus_t_is_inverse_macmahon():
    out = u_transform(q_series([1, -1], order=8, var="t"), 2)
    assert out == macmahon(8, var="t").inverse()


def test_u_transform_of_one():
    assert u_transform(TruncSeries.constant(QQ, 1, order=6, var="t"), 3) == TruncSeries.constant(QQ, 1, order=6, var="t")


@pytest.mark.parametrize("e", [1, 2, 3])
def test_u_transform_linear_log_coefficient(e):
    a = mpq(5, 3)
    f = q_series([0, a], order=6, var="t").exp()
    out = u_transform(f, e).log()
    assert out.coeff(1) == (-1) ** e * a
    assert out.coeff(2) == 0


@pytest.mark.parametrize("e", [1, 2, 3])
def test_u_transform_against_literal_product(e):
    """Multiply out the double product over n < N in Q(zeta_n) and reduce to rationals."""
    N = 7
    f = polynomial([1, -2, 3], var="t")
    expected = TruncSeries.constant(QQ, 1, order=N, var="t")
    for n in range(1, N):
        F = CycloField(n)
        inner = TruncSeries.constant(F, F.one, order=N, var="t")
        for k in range(1, n + 1):
            root = F.zeta(k) * F((-1) ** e)
            scaled = TruncSeries(F, {i: F(c) * root ** i for i, c in f.items()}, order=N, var="t")
            inner = inner * scaled
        rational = {}
        for i, c in inner.items():
            value = c if F.trivial else c.comps[0]
            assert F.trivial or all(not x for x in c.comps[1:])
            rational[i] = value
        expected = expected * TruncSeries(QQ, rational, order=N, var="t") ** n
    assert u_transform(f.truncate(N), e) == expected


@settings(max_examples=25, deadline=None)
@given(unit_t_series(), unit_t_series(), st.integers(1, 4))
def test_u_transform_is_multiplicative(f, g, e):
    assert u_transform(f * g, e) == u_transform(f, e) * u_transform(g, e)


# ---------------------------------------------------------------- MacMahon
def test_macmahon_coefficients():
    prod = q_series([1], order=6)
    for n in range(1, 6):
        prod = prod * q_series([1] + [0] * (n - 1) + [-1], order=6).pow_formal(-n)
    assert macmahon(6) == prod
    assert macmahon(6).coeff_list(0, 6) == [1, 1, 3, 6, 13, 24]


def test_macmahon_constant_term():
    assert macmahon(3).coeff(0) == 1


def test_macmahon_log_coefficients():
    lg = macmahon(12).log()
    for m in range(1, 12):
        assert lg.coeff(m) == mpq(sum(d * d for d in range(1, m + 1) if m % d == 0), m)
        assert sigma2(m) == sum(d * d for d in range(1, m + 1) if m % d == 0)
