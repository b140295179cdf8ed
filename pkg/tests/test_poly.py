from fractions import Fraction

import pytest
from hypothesis import given, settings

from bihomlc.poly import DEL, Poly, PolySyntaxError, parse_poly, slot

from conftest import polys

d = Poly.var(DEL)
lam = Poly.var(slot(0))
mu = Poly.var(slot(1))


def test_difference_of_squares():
    assert (d + lam) * (d - lam) == d**2 - lam**2


def test_additive_inverse_is_empty():
    p = parse_poly("3*del*l0 - 1/2")
    z = p + (-p)
    assert z.is_zero() and z.raw_terms == {}


def test_rational_scaling():
    assert (2 * d).scale(Fraction(1, 2)) == d


def test_substitute_examples():
    assert lam.substitute(slot(0), -d - lam) == -d - lam
    assert (d * mu).substitute(DEL, d + lam) == (d + lam) * mu
    l1, l2 = Poly.var(slot(1)), Poly.var(slot(2))
    p = (-d - lam) ** 2
    assert p.substitute(slot(0), l1 + l2) == (d + l1 + l2) ** 2


@pytest.mark.parametrize(
    "text, deg",
    [("del^2*l0 + 1", 3), ("0", -1), ("(del + l0)^3", 3), ("7", 0)],
)
def test_total_degree(text, deg):
    assert parse_poly(text).total_degree() == deg


def test_variable_order_in_rendering():
    assert str(parse_poly("l1*del^2*(2/3) - l0")) == "(2/3)*del^2*l1 - l0"


@pytest.mark.parametrize(
    "bad, col",
    [("del +", 6), ("2/0", 3), ("(del", 5), ("del ^ l0", 7), ("x", 1), ("delta", 1)],
)
def test_syntax_errors_carry_column(bad, col):
    with pytest.raises(PolySyntaxError) as exc:
        parse_poly(bad)
    assert exc.value.column == col


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(p, q, r):
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * q == q * p
    assert p * (q + r) == p * q + p * r
    assert p - p == Poly(0)


@settings(max_examples=60, deadline=None)
@given(polys())
def test_flip_is_an_involution(p):
    flip = {slot(0): -d - lam}
    assert p.subs(flip).subs(flip) == p


@settings(max_examples=60, deadline=None)
@given(polys())
def test_render_parse_round_trip(p):
    assert parse_poly(str(p)) == p


@settings(max_examples=40, deadline=None)
@given(polys(), polys())
def test_canonical_form_independent_of_order(p, q):
    a = (p + q) * (p - q)
    b = p * p - q * q
    assert a == b and a.raw_terms == b.raw_terms and hash(a) == hash(b)


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_substitution_is_ring_homomorphism(p, q, e):
    m = {slot(0): e}
    assert (p * q).subs(m) == p.subs(m) * q.subs(m)
    assert (p + q).subs(m) == p.subs(m) + q.subs(m)
