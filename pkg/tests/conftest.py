from fractions import Fraction

import pytest
from hypothesis import strategies as st

from bihomlc.examples import abelian1, current_algebra, twisted2
from bihomlc.poly import DEL, Poly, slot

VARS = (DEL, slot(0), slot(1))

small_fracs = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 4))


@st.composite
def polys(draw, variables=VARS, max_deg=3, max_terms=4):
    terms = draw(
        st.dictionaries(
            st.tuples(*[st.integers(0, max_deg) for _ in variables]), small_fracs, max_size=max_terms
        )
    )
    out = Poly(0)
    for exps, c in terms.items():
        out = out + Poly.monomial(dict(zip(variables, exps)), c)
    return out


@pytest.fixture(scope="session")
def tw():
    return twisted2()


@pytest.fixture(scope="session")
def cur():
    return current_algebra()


@pytest.fixture(scope="session")
def ab1():
    return abelian1()
