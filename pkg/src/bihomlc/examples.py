"""Builders for the shipped example objects.

``shipped_workspace()`` parses ``data/examples.bhl``; the builders below
construct the same objects directly and serve as an independent check of
the file.
"""

from __future__ import annotations

from fractions import Fraction
from importlib import resources

from .cohomology import Cochain
from .constructions import yau_twist
from .core import BiHomLieAlgebra, BilinearTable, ConformalAlgebra, adjoint_module
from .derivations import ConformalLinearMap
from .linalg import EndoMatrix, Vec
from .poly import Poly, parse_poly

EXAMPLES_FILE = "examples.bhl"


def _rank2(entries, alpha=(1, 1), beta=(1, 1)) -> ConformalAlgebra:
    """``entries`` maps ``(i, j)`` to a coefficient vector of length 2."""
    Z = Vec.zero(2)
    tbl = [[Z, Z], [Z, Z]]
    for (i, j), v in entries.items():
        tbl[i][j] = Vec(parse_poly(c) if isinstance(c, str) else c for c in v)
    return ConformalAlgebra(("x", "y"), BilinearTable(tbl, 2), EndoMatrix.diag(alpha), EndoMatrix.diag(beta))


def abelian1() -> ConformalAlgebra:
    return ConformalAlgebra(("e",), BilinearTable([[Vec.zero(1)]], 1), EndoMatrix.identity(1), EndoMatrix.identity(1))


def current_algebra() -> ConformalAlgebra:
    """Current algebra of the 2-dim Lie algebra ``[x, y] = y``."""
    return _rank2({(0, 1): (0, 1), (1, 0): (0, -1)})


TWIST_A = EndoMatrix.diag([1, 2])
TWIST_B = EndoMatrix.diag([1, 3])


def twisted2() -> ConformalAlgebra:
    """``current_algebra`` twisted by ``diag(1, 2)``, ``diag(1, 3)``."""
    return yau_twist(current_algebra(), TWIST_A, TWIST_B)


def twisted2_perturbed() -> ConformalAlgebra:
    """``twisted2`` with ``[x_l x] = (del + 2 l0) x``: skew-symmetric and
    multiplicative, but the Jacobi identity fails."""
    return _rank2({(0, 0): ("del + 2*l0", 0), (0, 1): (0, 3), (1, 0): (0, -2)}, (1, 2), (1, 3))


def broken_skew() -> ConformalAlgebra:
    """``[x_l x] = y``: every nested bracket vanishes, so only skew-symmetry fails."""
    return _rank2({(0, 0): (0, 1)})


def derived_bihom2() -> BiHomLieAlgebra:
    """``[x, y] = y`` twisted into a BiHom-Lie algebra by ``diag(1, 2)``, ``diag(1, 3)``."""
    return BiHomLieAlgebra.build(
        ("x", "y"), [[[0, 0], [0, 3]], [[0, -2], [0, 0]]], [[1, 0], [0, 2]], [[1, 0], [0, 3]]
    )


def _diag_map(a, b) -> ConformalLinearMap:
    p = lambda c: parse_poly(c) if isinstance(c, str) else Poly(c)  # noqa: E731
    return ConformalLinearMap([[p(a), 0], [0, p(b)]])


def shipped_maps() -> dict[str, ConformalLinearMap]:
    return {
        "twist_a": _diag_map(1, 2),
        "twist_b": _diag_map(1, 3),
        "nij": _diag_map("del", 0),
        "half_id": _diag_map(Fraction(3, 2), Fraction(3, 2)),
        "der01": _diag_map(0, "l0"),
        "der01_bad": _diag_map(1, "l0"),
        "der01_wide": _diag_map("(1/3)*del + (1/3)*l0", "del"),
    }


def shipped_cochains(A: ConformalAlgebra, M) -> dict[str, Cochain]:
    return {
        "g0": Cochain(M, 0, {(): Vec([1, 0])}),
        "g1": Cochain(M, 1, {(0,): Vec([1, 0])}),
    }


def shipped_workspace():
    from .textformat import parse_definitions

    text = resources.files("bihomlc").joinpath("data", EXAMPLES_FILE).read_text(encoding="utf-8")
    return parse_definitions(text)


def build_workspace():
    """The shipped workspace built from Python, without the parser."""
    from .textformat import Workspace

    W = Workspace()
    W.bihoms["derived2"] = derived_bihom2()
    W.algebras.update(
        {
            "abelian1": abelian1(),
            "current2": current_algebra(),
            "twisted2": twisted2(),
            "twisted2_bad": twisted2_perturbed(),
            "broken_skew": broken_skew(),
        }
    )
    adj = adjoint_module(W.algebras["twisted2"])
    W.modules["adj2"] = adj
    W.parents[("module", "adj2")] = "twisted2"
    for name, D in shipped_maps().items():
        W.maps[name] = D
        W.parents[("clm", name)] = "current2" if name.startswith("twist_") else "twisted2"
    for name, g in shipped_cochains(W.algebras["twisted2"], adj).items():
        W.cochains[name] = g
        W.parents[("cochain", name)] = "adj2"
    return W
