"""Cyclotomic arithmetic and Newton-Puiseux branches of ``H^e = q Q(H)``."""

from __future__ import annotations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from quotseries.cyclo import CycloField, cyclotomic_coeffs, euler_phi
from quotseries.errors import DomainError, NonInvertible, SymmetryViolation
from quotseries.puiseux import (check_branch, lagrange_unit, principal_unit, puiseux_branches,
                                symmetric_reduce)
from quotseries.rings import QQ
from quotseries.series import TruncSeries, polynomial

field_orders = st.sampled_from([3, 4, 5, 6, 7, 8, 9, 10, 12])
FIELDS = {e: CycloField(e) for e in (3, 4, 5, 6, 7, 8, 9, 10, 12)}


@st.composite
def cyclo_elements(draw, e):
    F = FIELDS[e]
    comps = draw(st.lists(st.integers(-4, 4), min_size=F.degree, max_size=F.degree))
    return F.from_vector(comps)


@st.composite
def normalized_Q(draw, max_degree=4):
    tail = draw(st.lists(st.integers(-3, 3), min_size=1, max_size=max_degree))
    return polynomial([1] + tail)


# ---------------------------------------------------------------- cyclotomic polynomials
def test_cyclotomic_e1():
    assert cyclotomic_coeffs(1) == (-1, 1)


def test_cyclotomic_e4():
    assert cyclotomic_coeffs(4) == (1, 0, 1)


def test_cyclotomic_e6_by_division():
    x = sympy.symbols("x")
    quotient = sympy.div(x**6 - 1, (x - 1) * (x + 1) * (x**2 + x + 1), x)
    assert quotient[1] == 0
    expected = tuple(int(c) for c in reversed(sympy.Poly(quotient[0], x).all_coeffs()))
    assert cyclotomic_coeffs(6) == expected == (1, -1, 1)


@pytest.mark.parametrize("e", range(1, 25))
def test_cyclotomic_degree_is_totient(e):
    assert len(cyclotomic_coeffs(e)) - 1 == euler_phi(e) == sympy.totient(e)


# ---------------------------------------------------------------- field laws
@pytest.mark.parametrize("e", [1, 2, 3, 4, 5, 6, 8, 12])
def test_zeta_has_order_e(e):
    F = CycloField(e)
    assert F.zeta(1) ** e == F.one
    for k in range(1, e):
        assert F.zeta(k) != F.one


@pytest.mark.parametrize("e", [1, 2, 3, 4, 5, 6, 7, 9])
def test_root_of_unity_power_sums(e):
    F = CycloField(e)
    for m in range(4 * e + 1):
        total = F.zero
        for k in range(e):
            total = total + F.zeta(k * m)
        assert total == F(e if m % e == 0 else 0)


@settings(max_examples=60, deadline=None)
@given(field_orders.flatmap(lambda e: st.tuples(cyclo_elements(e), cyclo_elements(e), cyclo_elements(e))))
def test_commutative_ring_axioms(triple):
    a, b, c = triple
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == a.field.zero


@settings(max_examples=60, deadline=None)
@given(field_orders.flatmap(lambda e: st.tuples(cyclo_elements(e), cyclo_elements(e))))
def test_inverses_and_exact_division(pair):
    a, b = pair
    F = a.field
    if b:
        assert b * F.inverse(b) == F.one
        assert (a * b) * F.inverse(b) == a


def test_zero_has_no_inverse():
    F = CycloField(5)
    with pytest.raises(NonInvertible):
        F.inverse(F.zero)


# ---------------------------------------------------------------- branches
def test_square_roots_of_q():
    H0, H1 = (br.series for br in puiseux_branches(polynomial([1]), 2, 6))
    assert dict(H0.items()) == {1: 1}
    assert dict(H1.items()) == {1: -1}


def _fixed_point(Q, order):
    """Iterate ``H <- q Q(H)`` over the rationals until it stabilises."""
    H = TruncSeries(QQ, {1: 1}, order=order, var="q")
    for _ in range(order + 1):
        H = Q.compose(H).shift(1).truncate(order).rename("q")
    return H


def test_branch_of_one_plus_z():
    (br,) = puiseux_branches(polynomial([1, 1]), 1, 6)
    assert br.series.coeff_list(1, 7) == [1] * 6
    assert br.series.rename("q") == _fixed_point(polynomial([1, 1]), 7)


def test_branch_of_one_plus_z_squared_is_catalan():
    (br,) = puiseux_branches(polynomial([1, 2, 1]), 1, 6)
    assert br.series.coeff_list(1, 5) == [1, 2, 5, 14]
    assert br.series.rename("q") == _fixed_point(polynomial([1, 2, 1]), 7)


def test_non_normalized_Q_is_rejected():
    with pytest.raises(DomainError):
        puiseux_branches(polynomial([2, 1]), 2, 4)


def test_product_of_square_roots():
    H0, H1 = (br.series for br in puiseux_branches(polynomial([1]), 2, 4))
    assert symmetric_reduce(H0 * H1, 2) == TruncSeries(QQ, {1: -1})


def test_sum_of_single_branch():
    (br,) = puiseux_branches(polynomial([1, 1]), 1, 6)
    total = symmetric_reduce(br.series, 1)
    assert total.coeff_list(0, 6) == [0, 1, 1, 1, 1, 1]


def test_sum_of_squares_of_cube_roots_vanishes():
    branches = puiseux_branches(polynomial([1]), 3, 4)
    total = branches[0].series ** 2 + branches[1].series ** 2 + branches[2].series ** 2
    reduced = symmetric_reduce(total, 3)
    assert reduced.is_zero()


def test_non_symmetric_input_is_detected():
    branches = puiseux_branches(polynomial([1, 1]), 3, 4)
    with pytest.raises(SymmetryViolation):
        symmetric_reduce(branches[0].series, 3)


def test_fractional_power_is_detected():
    branches = puiseux_branches(polynomial([1]), 2, 4)
    with pytest.raises(SymmetryViolation):
        symmetric_reduce(branches[0].series, 2)


@settings(max_examples=25, deadline=None)
@given(normalized_Q(), st.integers(1, 4))
def test_back_substitution_vanishes(Q, e):
    for br in puiseux_branches(Q, e, 5, verify=False):
        check_branch(Q, br)
        assert br.series.valuation() == 1
        assert br.series.coeff(1) == br.series.ring.zeta(br.index)


@settings(max_examples=25, deadline=None)
@given(normalized_Q(), st.integers(2, 4))
def test_branches_are_conjugate(Q, e):
    branches = puiseux_branches(Q, e, 4)
    field = branches[0].series.ring
    H0 = branches[0].series
    for br in branches:
        rotated = {k: (field.zeta(br.index * k) * c) for k, c in H0.items()}
        assert dict(br.series.items()) == {k: c for k, c in rotated.items() if c}
    leading = [br.series.coeff(1) for br in branches]
    assert len({repr(c) for c in leading}) == e


@settings(max_examples=25, deadline=None)
@given(normalized_Q(), st.integers(1, 4))
def test_lagrange_unit_matches_fixed_point(Q, e):
    assert lagrange_unit(Q, e, 9) == principal_unit(Q, e, 9)


@settings(max_examples=20, deadline=None)
@given(normalized_Q(), st.integers(1, 4))
def test_product_of_branches_over_q_is_rational(Q, e):
    branches = puiseux_branches(Q, e, 4)
    prod = branches[0].series
    for br in branches[1:]:
        prod = prod * br.series
    reduced = symmetric_reduce(prod, e)
    assert reduced.valuation() == 1
    assert reduced.coeff(1) == (-1) ** (e - 1)
