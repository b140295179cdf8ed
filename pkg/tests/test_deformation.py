from fractions import Fraction

import pytest

from bihomlc.core import LAM, BilinearTable
from bihomlc.deformation import (
    T_P,
    FormalDeformation,
    check_deformation,
    check_nijenhuis,
    check_triviality,
    deformation_from_nijenhuis,
    find_nijenhuis,
    twist_commutant_basis,
    deformed_bracket_eval,
    nijenhuis_bracket,
)
from bihomlc.linalg import EndoMatrix, Vec
from bihomlc.poly import DEL, T, Poly, parse_poly

d = Poly.var(DEL)
x, y = Vec.unit(2, 0), Vec.unit(2, 1)

NIJ = EndoMatrix.diag([d, 0])


def t_coefficient(v: Vec, e: int) -> Vec:
    return Vec(p.coefficients_in(T).get(e, Poly(0)) for p in v)


def test_zero_psi_gives_base(tw):
    Df = FormalDeformation(tw, BilinearTable.zero(2, 2, 2))
    assert deformed_bracket_eval(Df, x, y) == tw.br(x, y)
    assert check_deformation(Df).passed


def test_definitional_value(tw):
    psi = nijenhuis_bracket(tw, NIJ)
    Df = FormalDeformation(tw, psi)
    v = deformed_bracket_eval(Df, x, y)
    assert t_coefficient(v, 0) == tw.br(x, y)
    assert t_coefficient(v, 1) == psi.eval(x, y, LAM)


def test_t_coefficient_is_nijenhuis_bracket(tw):
    Df = deformation_from_nijenhuis(tw, NIJ)
    for a in tw.basis():
        for b in tw.basis():
            want = tw.br(NIJ.apply(a), b) + tw.br(a, NIJ.apply(b)) - NIJ.apply(tw.br(a, b))
            assert t_coefficient(deformed_bracket_eval(Df, a, b), 1) == want


def test_frozen_nijenhuis_values(tw):
    psi = nijenhuis_bracket(tw, NIJ)
    assert psi.eval(x, y, LAM) == Vec([0, parse_poly("-3*l0")])
    assert psi.eval(y, x, LAM) == Vec([0, parse_poly("-2*del - 2*l0")])
    assert psi.eval(x, x, LAM).is_zero()


@pytest.mark.parametrize("c", [0, 1, Fraction(3, 2), -2])
def test_scalar_operators(tw, c):
    f = EndoMatrix.identity(2).scale(c)
    assert nijenhuis_bracket(tw, f) == tw.bracket.scale(c)
    assert check_nijenhuis(tw, f).passed
    Df = deformation_from_nijenhuis(tw, f)
    assert check_deformation(Df).passed
    assert check_triviality(Df, f).passed


def test_psi_equal_to_bracket_on_current_algebra(cur):
    assert check_deformation(FormalDeformation(cur, cur.bracket)).passed


def test_broken_skew_psi_detected(cur):
    psi = BilinearTable([[Vec.zero(2), y], [y, Vec.zero(2)]], 2)
    assert "psi-skew" in check_deformation(FormalDeformation(cur, psi)).tags()


def test_projection_onto_ideal(tw):
    # y spans an ideal; the projection onto it commutes with both twists
    # and is Nijenhuis: the deformed bracket vanishes identically
    f = EndoMatrix.diag([0, 1])
    assert nijenhuis_bracket(tw, f).is_zero()
    assert check_nijenhuis(tw, f).passed


def test_non_nijenhuis_witness(tw):
    f = EndoMatrix.diag([0, d])
    # [x_l y]_N = [x_l del y] - del [x_l y] = 3 l0 y, while [f x_l f y] = 0
    assert nijenhuis_bracket(tw, f).eval(x, y, LAM) == y * (3 * LAM)
    rep = check_nijenhuis(tw, f)
    assert (0, 1) in rep.witnesses("nijenhuis")


def test_del_nijenhuis_theorem_chain(tw):
    assert check_nijenhuis(tw, NIJ).passed
    Df = deformation_from_nijenhuis(tw, NIJ)
    assert check_deformation(Df).passed
    assert check_triviality(Df, NIJ).passed


def test_operator_must_commute_with_twists(tw):
    with pytest.raises(ValueError, match="commute"):
        nijenhuis_bracket(tw, EndoMatrix([[0, 1], [0, 0]]))


def test_non_nijenhuis_rejected(tw):
    with pytest.raises(ValueError, match="not Nijenhuis"):
        deformation_from_nijenhuis(tw, EndoMatrix.diag([0, d]))


def test_table_keeps_t(tw):
    Df = deformation_from_nijenhuis(tw, EndoMatrix.identity(2))
    v = Df.table().eval(x, y, LAM)
    assert v == y * (3 + 3 * T_P)


def test_twist_commutant_is_diagonal(tw):
    basis = twist_commutant_basis(tw, 1)
    assert len(basis) == 4
    assert all(m.rows[0][1].is_zero() and m.rows[1][0].is_zero() for m in basis)


def test_search_finds_the_shipped_candidate(tw):
    found = find_nijenhuis(tw, 1)
    assert NIJ in found
    assert all(check_nijenhuis(tw, f).passed for f in found)
    assert EndoMatrix.diag([0, d]) not in found


def test_every_found_operator_gives_trivial_deformation(tw):
    for f in find_nijenhuis(tw, 1):
        Df = deformation_from_nijenhuis(tw, f)
        assert check_deformation(Df).passed
        assert check_triviality(Df, f).passed
