from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bihomlc.core import BilinearTable, ConformalAlgebra
from bihomlc.examples import build_workspace, shipped_workspace
from bihomlc.linalg import EndoMatrix, Vec
from bihomlc.poly import DEL, slot
from bihomlc.textformat import ERROR_CODES, ParseError, Workspace, parse_definitions, parse_terms, render

from conftest import polys

SHIPPED = resources.files("bihomlc").joinpath("data", "examples.bhl").read_text(encoding="utf-8")


def parse_error(text):
    with pytest.raises(ParseError) as exc:
        parse_definitions(text)
    return exc.value


def test_minimal_abelian():
    W = parse_definitions("algebra abelian1 rank 1 basis e\n")
    assert list(W.algebras) == ["abelian1"]
    A = W.algebras["abelian1"]
    assert A.bracket.is_zero() and A.alpha == EndoMatrix.identity(1)


def test_full_block_with_comments_and_semicolons():
    text = """
    # twisted current algebra
    algebra tw rank 2 basis x y
      bracket x y -> (3) y ; bracket y x -> (-2) y   # two statements
      alpha 1: 1 0
      alpha 2: 0 2
      beta x: 1 0 ; beta y: 0 3
    """
    A = parse_definitions(text).algebras["tw"]
    assert A.br(Vec.unit(2, 0), Vec.unit(2, 1)) == Vec([0, 3])
    assert A.beta == EndoMatrix.diag([1, 3])


def test_forward_references_resolve():
    text = """
    cochain g over M arity 1
      value (x): x
    module M over A rank 1 basis x
    algebra A rank 1 basis x
    """
    W = parse_definitions(text)
    assert W.parents[("cochain", "g")] == "M" and W.parents[("module", "M")] == "A"


def test_unresolved_module():
    e = parse_error("algebra A rank 1 basis e\ncochain g over Nope arity 0\n")
    assert e.code == "unresolved-reference" and e.line == 2 and e.column == 16


def test_duplicate_name():
    e = parse_error("algebra A rank 1 basis e\nalgebra A rank 1 basis f\n")
    assert e.code == "duplicate-name" and e.line == 2


def test_rank_mismatch():
    e = parse_error("algebra A rank 2 basis e\n")
    assert e.code == "rank-mismatch"
    e = parse_error("algebra A rank 1 basis e\n  alpha e: 1 0\n")
    assert e.code == "rank-mismatch" and e.line == 2


def test_syntax_error_position():
    e = parse_error("algebra A rank 1 basis e\n  bracket e e -> (del +) e\n")
    assert e.code == "syntax" and e.line == 2 and e.column > 17


def test_invalid_variable():
    e = parse_error("algebra A rank 1 basis e\n  alpha e: l0\n")
    assert e.code == "invalid-value"


def test_error_codes_are_distinct():
    assert len(set(ERROR_CODES)) == len(ERROR_CODES)


def test_malformed_algebra_still_parses():
    # axioms are never checked at parse time
    W = parse_definitions("algebra b rank 2 basis x y\n  bracket x y -> y\n  bracket y x -> y\n")
    assert "b" in W.algebras


def test_shipped_round_trip():
    W = parse_definitions(SHIPPED)
    assert W.same_as(build_workspace())
    text = render(W)
    W2 = parse_definitions(text)
    assert W2.same_as(W)
    assert render(W2) == text


def test_shipped_golden_render():
    # the shipped file is the canonical rendering plus comments
    stripped = "\n".join(ln for ln in SHIPPED.splitlines() if ln and not ln.startswith("#"))
    assert stripped + "\n" == render(build_workspace()).replace("\n\n", "\n")


def test_shipped_workspace_loader():
    assert shipped_workspace().same_as(build_workspace())


def test_parse_terms():
    v = parse_terms("(del + 1) x - y", ("x", "y"))
    assert str(v[0]) == "del + 1" and str(v[1]) == "-1"
    with pytest.raises(ParseError):
        parse_terms("z", ("x", "y"))


@settings(max_examples=30, deadline=None)
@given(st.lists(polys(variables=(DEL, slot(0)), max_deg=2), min_size=8, max_size=8),
       st.lists(polys(variables=(DEL,), max_deg=2), min_size=4, max_size=4))
def test_random_algebra_round_trip(bracket_polys, twist_polys):
    it = iter(bracket_polys)
    tbl = BilinearTable([[Vec([next(it), next(it)]) for _ in range(2)] for _ in range(2)], 2)
    a = EndoMatrix([twist_polys[:2], twist_polys[2:]])
    A = ConformalAlgebra(("p", "q"), tbl, a, EndoMatrix.identity(2))
    W = Workspace(algebras={"r": A})
    assert parse_definitions(render(W)).same_as(W)
