from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bihomlc.derivations import (
    KINDS,
    ConformalLinearMap,
    GenDerWitness,
    check_centroid_bracket_central,
    check_der_bihom_structure,
    check_generalized,
    clm_apply,
    clm_commutator,
    clm_in_span,
    clm_partial,
    commutator_derivation_report,
    commutator_kind_report,
    decompose_gder,
    inner_derivation,
    is_derivation,
    quasicentroid_commutator_report,
    solve_derivations,
    solve_generalized,
    span_basis,
)
from bihomlc.linalg import Vec
from bihomlc.poly import DEL, Poly, parse_poly, slot

d = Poly.var(DEL)
l0, l1 = Poly.var(slot(0)), Poly.var(slot(1))
x, y = Vec.unit(2, 0), Vec.unit(2, 1)


def clm(*rows):
    return ConformalLinearMap([[parse_poly(str(c)) for c in r] for r in rows])


def firsts(ws):
    return [w.map for w in ws]


# -- application --------------------------------------------------------------


def test_apply_examples():
    assert clm_apply(ConformalLinearMap.zero(2), x + y).is_zero()
    assert clm_apply(ConformalLinearMap.identity(1), Vec([d])) == Vec([d + l0])
    D = clm(["l0*del", 0], [0, 0])
    assert clm_apply(D, x) == x * (l0 * d)


def test_partial():
    D = clm(["del", 1], [0, "l0"])
    assert clm_partial(clm_partial(D)) == D.scale_poly(l0 * l0)
    assert clm_partial(ConformalLinearMap.zero(2)).is_zero()
    v = x * d + y
    assert clm_apply(clm_partial(D), v) == clm_apply(D, v) * -l0


def test_commutator_examples():
    K = clm([1, 2], [0, 3])
    assert clm_commutator(K, K).is_zero()
    # with del-dependence the two orders differ: (del + l0) del - (del + l1 - l0) del
    D = clm(["del", 0], [0, "l0"])
    assert clm_commutator(D, D) == ConformalLinearMap([[parse_poly("2*del*l0 - del*l1"), 0], [0, 0]], var=1)
    P, Q = clm([0, 1], [0, 0]), clm([1, 0], [0, 2])
    C = clm_commutator(P, Q)
    assert C.entries == ((Poly(0), Poly(2 - 1)), (Poly(0), Poly(0)))
    assert C.var == 1


# -- derivations --------------------------------------------------------------


def test_zero_map_is_derivation(tw):
    for k, l in product(range(3), repeat=2):
        assert is_derivation(tw, ConformalLinearMap.zero(2), k, l).passed


def test_abelian_any_map_is_derivation(ab1):
    assert is_derivation(ab1, clm(["del^2 + 3*l0"]), 2, 5).passed


def test_inner_derivations(tw, ab1):
    D = inner_derivation(tw, x, 0, 1)
    assert D == clm([0, 0], [0, 6])
    assert is_derivation(tw, D, 1, 1).passed
    assert inner_derivation(tw, Vec.zero(2), 0, 1).is_zero()
    assert inner_derivation(ab1, Vec([1]), 0, 1).is_zero()
    with pytest.raises(ValueError, match="fixed"):
        inner_derivation(tw, y, 0, 1)


@pytest.mark.parametrize("D", [0, 1, 2])
def test_abelian_dimensions(ab1, D):
    assert len(solve_derivations(ab1, 0, 0, D)) == (D + 1) * (D + 2) // 2


def test_frozen_basis_twisted(tw):
    assert solve_derivations(tw, 0, 0, 1) == [clm([0, 0], [0, 1]), clm(["del + l0", 0], [0, "del"]), clm([0, 0], [0, "l0"])]


@pytest.mark.parametrize("kl", [(0, 0), (0, 1), (1, 0), (1, 1)])
def test_solver_checker_duality(tw, kl):
    k, l = kl
    basis = solve_derivations(tw, k, l, 2)
    for D in basis:
        assert is_derivation(tw, D, k, l).passed
    assert clm_in_span(basis, ConformalLinearMap.zero(2))


def test_known_derivation_in_span(tw):
    assert clm_in_span(solve_derivations(tw, 0, 1, 1), clm([0, 0], [0, "l0"]))
    assert not clm_in_span(solve_derivations(tw, 0, 1, 1), clm([1, 0], [0, "l0"]))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=9, max_size=9))
def test_random_omega_maps(tw, cs):
    # random diagonal maps of degree <= 1: derivation iff in the solved span
    monos = [Poly(1), d, l0]
    a = sum((Poly(c) * m for c, m in zip(cs[:3], monos)), Poly(0))
    b = sum((Poly(c) * m for c, m in zip(cs[3:6], monos)), Poly(0))
    D = ConformalLinearMap([[a, 0], [0, b]])
    basis = solve_derivations(tw, 0, 0, 1)
    assert is_derivation(tw, D, 0, 0).passed == clm_in_span(basis, D)


def test_lemma_commutator_is_derivation(tw):
    bases = {kl: solve_derivations(tw, *kl, 1) for kl in ((0, 0), (0, 1), (1, 0))}
    for (k, l), (s, t) in product(bases, repeat=2):
        for D, E in product(bases[(k, l)], bases[(s, t)]):
            assert commutator_derivation_report(tw, D, k, l, E, s, t).passed


def test_structure_on_small_samples(tw, cur):
    assert check_der_bihom_structure(tw, [ConformalLinearMap.zero(2)]).passed
    consts = solve_derivations(cur, 0, 0, 0)
    assert len(consts) == 2 and all(D.max_degree() == 0 for D in consts)
    assert check_der_bihom_structure(cur, consts).passed
    assert check_der_bihom_structure(cur, solve_derivations(cur, 0, 0, 1)).passed


# -- generalized derivations ----------------------------------------------------


def test_abelian_generalized_kinds(ab1):
    omega = 6  # all 1x1 maps of degree <= 2
    for kind in ("central", "centroid", "quasicentroid"):
        assert len(solve_generalized(ab1, kind, 0, 0, 2)) == omega


def test_identity_is_centroid(cur):
    ws = solve_generalized(cur, "centroid", 0, 0, 1)
    assert clm_in_span(firsts(ws), ConformalLinearMap.identity(2))


def test_frozen_dimensions_twisted(tw):
    dims = {kind: len(solve_generalized(tw, kind, 0, 0, 1)) for kind in KINDS}
    assert dims == {"gder": 10, "qder": 8, "centroid": 2, "quasicentroid": 2, "central": 0}
    spans = {kind: len(span_basis(firsts(solve_generalized(tw, kind, 0, 0, 1)))) for kind in ("gder", "qder")}
    assert spans == {"gder": 5, "qder": 5}


@pytest.mark.parametrize("kl", [(0, 0), (0, 1), (1, 0)])
def test_inclusion_chain(tw, kl):
    k, l = kl
    D = 1
    z = firsts(solve_generalized(tw, "central", k, l, D))
    der = solve_derivations(tw, k, l, D)
    q = firsts(solve_generalized(tw, "qder", k, l, D))
    g = firsts(solve_generalized(tw, "gder", k, l, D))
    c = firsts(solve_generalized(tw, "centroid", k, l, D))
    qc = firsts(solve_generalized(tw, "quasicentroid", k, l, D))
    for small, big in ((z, der), (der, q), (q, g), (c, qc), (qc, g)):
        assert all(clm_in_span(big, m) for m in small)
    assert len(span_basis(g)) >= len(span_basis(q)) >= len(span_basis(der))


def test_all_witnesses_pass_their_predicate(tw):
    for kind in KINDS:
        for w in solve_generalized(tw, kind, 0, 1, 1):
            assert check_generalized(tw, w).passed


def test_decompose_trivial_cases(tw):
    D = clm([0, 0], [0, "l0"])
    w = GenDerWitness("gder", (D, D, D), 0, 1)
    assert check_generalized(tw, w).passed
    q, c = decompose_gder(tw, w)
    assert q.maps == (D, D) and c.map.is_zero()
    qc = solve_generalized(tw, "quasicentroid", 0, 0, 1)[0].map
    w2 = GenDerWitness("gder", (qc, -qc, ConformalLinearMap.zero(2)), 0, 0)
    q2, c2 = decompose_gder(tw, w2)
    assert q2.map.is_zero() and c2.map == qc


@pytest.mark.parametrize("kl", [(0, 0), (0, 1), (1, 0)])
def test_decompose_every_gder_witness(tw, kl):
    for w in solve_generalized(tw, "gder", *kl, 1):
        q, c = decompose_gder(tw, w)
        assert q.map + c.map == w.map


def test_centroid_commutators_vanish_without_center(tw):
    cs = solve_generalized(tw, "centroid", 0, 0, 1)
    qs = solve_generalized(tw, "quasicentroid", 0, 0, 1)
    for c, q in product(cs, qs):
        assert clm_commutator(c.map, q.map).is_zero()
        assert check_centroid_bracket_central(tw, c, q, 3).passed
    assert quasicentroid_commutator_report(tw, qs).passed


def test_centroid_check_abelian(ab1):
    cs = solve_generalized(ab1, "centroid", 0, 0, 1)
    qs = solve_generalized(ab1, "quasicentroid", 0, 0, 1)
    for c, q in product(cs, qs):
        assert check_centroid_bracket_central(ab1, c, q, 2).passed


def test_identity_centroid_commutes(cur):
    c = GenDerWitness("centroid", (ConformalLinearMap.identity(2),), 0, 0)
    for q in solve_generalized(cur, "quasicentroid", 0, 0, 1):
        assert clm_commutator(c.map, q.map).is_zero()


def test_central_derivations_form_ideal(ab1):
    for Z, D in product(firsts(solve_generalized(ab1, "central", 0, 0, 1)), solve_derivations(ab1, 0, 0, 1)):
        assert commutator_kind_report(ab1, "central", Z, D, 0, 0).passed
        assert commutator_kind_report(ab1, "central", D, Z, 0, 0).passed


def test_witness_validation():
    with pytest.raises(ValueError):
        GenDerWitness("gder", (ConformalLinearMap.zero(1),), 0, 0)
    with pytest.raises(ValueError):
        GenDerWitness("nonsense", (ConformalLinearMap.zero(1),), 0, 0)
