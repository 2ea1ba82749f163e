from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwfock.rationals import Coeff, ONE, PoleAtTZero, T, ZERO


def test_basic_construction():
    assert Coeff.of(0) is ZERO
    assert Coeff.of(1) is ONE
    assert Coeff.of(Fraction(3, 4)).as_fraction() == Fraction(3, 4)
    assert not ZERO
    assert ONE


def test_add_mul_reduce():
    half = Coeff.of(Fraction(1, 2))
    assert half + half == ONE
    assert (T + 1) * (T - 1) == T * T - 1
    # (p/q + r/s) recombines to reduced form
    a = ONE / (T + 1)
    b = ONE / (T - 1)
    s = a + b
    # 1/(t+1) + 1/(t-1) = 2t/(t^2-1)
    assert s * (T * T - 1) == 2 * T


def test_monic_denominator_canonical():
    # 1/(2t + 2) must normalize to (1/2)/(t+1): monic denominator
    c = ONE / (2 * T + 2)
    assert c.den == (Fraction(1), Fraction(1))
    assert c * (T + 1) == Coeff.of(Fraction(1, 2))


def test_t_offsets():
    c = T ** 3 / T  # t^2
    assert c == Coeff.t_power(2)
    d = ONE / T
    assert d.off == -1
    assert d * T == ONE


def test_division_and_gcd():
    n = (T + 1) * (T + 2)
    d = (T + 1) * (T + 3)
    c = n / d
    assert c * (T + 3) == T + 2


def test_neg_t():
    c = (T + 1) / (T - 2)
    m = c.neg_t()
    assert m == (1 - T) / (-T - 2) == (T - 1) / (T + 2)
    assert Coeff.t_power(3).neg_t() == -Coeff.t_power(3)


def test_at_t_zero():
    assert ((T + 1) / (T + 2)).at_t_zero() == Fraction(1, 2)
    assert (T * (T + 5)).at_t_zero() == 0
    with pytest.raises(PoleAtTZero):
        (ONE / T).at_t_zero()


def test_pow():
    assert (T + 1) ** 0 == ONE
    assert (T + 1) ** 2 == T * T + 2 * T + 1
    assert T ** -2 == ONE / (T * T)


def test_render():
    assert ZERO.render() == "0"
    assert ONE.render() == "1"
    assert Coeff.of(Fraction(-1, 24)).render() == "-1/24"
    assert T.render() == "t"
    assert (T * T - 1).render() == "t^2 - 1"
    assert (Coeff.of(Fraction(1, 2)) * T).render() == "t/2"
    assert (ONE / T).render() == "1/t"
    assert ((T + 1) / (T * (T + 2))).render() == "(t + 1)/(t^2 + 2*t)"


def test_is_polynomial():
    assert (T ** 2 + 3).is_polynomial()
    assert not (ONE / T).is_polynomial()
    assert not (ONE / (T + 1)).is_polynomial()
    assert ZERO.is_polynomial()


small_fracs = st.fractions(min_value=-4, max_value=4, max_denominator=6)


@st.composite
def coeffs(draw):
    num = draw(st.lists(small_fracs, min_size=0, max_size=3))
    off = draw(st.integers(min_value=-2, max_value=2))
    den = draw(st.lists(small_fracs, min_size=1, max_size=3))
    if not any(den):
        den = [Fraction(1)]
    return Coeff(off, tuple(num), tuple(den))


@settings(max_examples=60, deadline=None)
@given(coeffs(), coeffs(), coeffs())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    if a:
        assert a * a.inv() == ONE


@settings(max_examples=40, deadline=None)
@given(coeffs())
def test_neg_t_involution(a):
    assert a.neg_t().neg_t() == a
