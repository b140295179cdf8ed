"""One-parameter deformations ``[a_l b]_t = [a_l b] + t psi_l(a, b)`` and
Nijenhuis operators.

``psi`` is stored like a bracket table: entries are polynomials in ``del``
and ``l0`` giving ``psi_{l0, -del-l0}(e_i, e_j)``, extended sesquilinearly.
The deformation parameter ``t`` is a formal polynomial variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

from .core import LAM, MU, BilinearTable, CheckReport, ConformalAlgebra
from .linalg import EndoMatrix, Vec, solve_kernel
from .poly import DEL, T, Poly, ZERO, slot

DEL_P = Poly.var(DEL)
T_P = Poly.var(T)


@dataclass(frozen=True, eq=False)
class FormalDeformation:
    base: ConformalAlgebra
    psi: BilinearTable

    def __post_init__(self):
        n = self.base.rank
        if (self.psi.n_left, self.psi.n_right, self.psi.n_out) != (n, n, n):
            raise ValueError("deformation datum shape does not match the algebra")
        for _, _, v in self.psi._nonzero:
            for p in v:
                if p.variables() - {DEL, slot(0)}:
                    raise ValueError("deformation datum may only use del and l0")

    def table(self) -> BilinearTable:
        """The deformed bracket with ``t`` kept as a variable."""
        return self.base.bracket + self.psi.map_values(lambda v: v * T_P)


def deformed_bracket_eval(Df: FormalDeformation, a: Vec, b: Vec, x: Poly = LAM) -> Vec:
    return Df.base.br(a, b, x) + Df.psi.eval(a, b, x) * T_P


def _t_levels(v: Vec) -> dict[int, Vec]:
    levels: dict[int, list] = {}
    n = len(v)
    for k, p in enumerate(v.c):
        for e, c in p.coefficients_in(T).items():
            levels.setdefault(e, [ZERO] * n)[k] = c
    return {e: Vec(c) for e, c in levels.items()}


def check_deformation(Df: FormalDeformation) -> CheckReport:
    """The deformed bracket's skew-symmetry and Jacobi identity, split by
    powers of ``t``: skew at t^1 (tag ``psi-skew``), Jacobi at t^2
    (``psi-jacobi``) and at t^1 (``mixed-jacobi``); multiplicativity of
    ``psi`` under both twists (``psi-multiplicativity``)."""
    A = Df.base
    rep = CheckReport()
    tbl = Df.table()
    n = A.rank
    E = A.basis()
    al, be = A.alpha, A.beta
    aE = [al.apply(e) for e in E]
    bE = [be.apply(e) for e in E]
    abE = [al.apply(v) for v in bE]
    flip = -DEL_P - LAM

    def br(u, v, x):
        return tbl.eval(u, v, x)

    for i, j in product(range(n), repeat=2):
        val = Df.psi.eval(E[i], E[j], LAM)
        rep.expect_equal("psi-multiplicativity", (i, j), al.apply(val), Df.psi.eval(aE[i], aE[j], LAM), "alpha")
        rep.expect_equal("psi-multiplicativity", (i, j), be.apply(val), Df.psi.eval(bE[i], bE[j], LAM), "beta")
        s = br(bE[i], aE[j], LAM) + br(bE[j], aE[i], flip)
        lv = _t_levels(s)
        rep.expect_zero("psi-skew", (i, j), lv.get(1, Vec.zero(n)))
    for i, j, k in product(range(n), repeat=3):
        lhs = br(abE[i], br(E[j], E[k], MU), LAM)
        r1 = br(br(bE[i], E[j], LAM), bE[k], LAM + MU)
        r2 = br(bE[j], br(aE[i], E[k], LAM), MU)
        lv = _t_levels(lhs - r1 - r2)
        rep.expect_zero("mixed-jacobi", (i, j, k), lv.get(1, Vec.zero(n)))
        rep.expect_zero("psi-jacobi", (i, j, k), lv.get(2, Vec.zero(n)))
    return rep


def _check_candidate(A: ConformalAlgebra, f: EndoMatrix) -> None:
    if f.n != A.rank:
        raise ValueError("operator rank does not match the algebra")
    if not (f.commutes_with(A.alpha) and f.commutes_with(A.beta)):
        raise ValueError("operator must commute with alpha and beta")


def nijenhuis_bracket(A: ConformalAlgebra, f: EndoMatrix) -> BilinearTable:
    """``[a_l b]_N = [f(a)_l b] + [a_l f(b)] - f([a_l b])`` on basis pairs."""
    _check_candidate(A, f)
    E = A.basis()
    n = A.rank
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            v = A.br(f.apply(E[i]), E[j], LAM) + A.br(E[i], f.apply(E[j]), LAM) - f.apply(A.br(E[i], E[j], LAM))
            row.append(v)
        entries.append(row)
    return BilinearTable(entries, n)


def check_nijenhuis(A: ConformalAlgebra, f: EndoMatrix) -> CheckReport:
    """``[f(a)_l f(b)] = f([a_l b]_N)`` on all basis pairs."""
    N = nijenhuis_bracket(A, f)
    rep = CheckReport()
    E = A.basis()
    for i, j in product(range(A.rank), repeat=2):
        lhs = A.br(f.apply(E[i]), f.apply(E[j]), LAM)
        rhs = f.apply(N.eval(E[i], E[j], LAM))
        rep.expect_equal("nijenhuis", (i, j), lhs, rhs)
    return rep


def deformation_from_nijenhuis(A: ConformalAlgebra, f: EndoMatrix) -> FormalDeformation:
    rep = check_nijenhuis(A, f)
    if not rep.passed:
        w = rep.failures[0].witness
        raise ValueError(f"operator is not Nijenhuis: fails at {w}")
    return FormalDeformation(A, nijenhuis_bracket(A, f))


def check_triviality(Df: FormalDeformation, f: EndoMatrix) -> CheckReport:
    """``T_t([a_l b]_t) = [T_t(a)_l T_t(b)]`` with ``T_t = id + t f``,
    matched at t^0, t^1 and t^2 (tags ``trivial-t0`` .. ``trivial-t2``)."""
    A = Df.base
    _check_candidate(A, f)
    rep = CheckReport()
    n = A.rank
    E = A.basis()
    Tt = EndoMatrix.identity(n) + f.scale(T_P)
    for i, j in product(range(n), repeat=2):
        lhs = Tt.apply(deformed_bracket_eval(Df, E[i], E[j]))
        rhs = A.br(Tt.apply(E[i]), Tt.apply(E[j]), LAM)
        diff = _t_levels(lhs - rhs)
        if any(e > 2 for e in diff):
            raise AssertionError("t-degree above 2")
        for e in range(3):
            rep.expect_zero(f"trivial-t{e}", (i, j), diff.get(e, Vec.zero(n)))
    return rep


def twist_commutant_basis(A: ConformalAlgebra, degree_bound: int) -> list[EndoMatrix]:
    """Basis of the Q[del]-matrices of entry degree <= D commuting with alpha and beta."""
    n = A.rank
    units = [(r, c, k) for r in range(n) for c in range(n) for k in range(degree_bound + 1)]

    def unit(u) -> EndoMatrix:
        r, c, k = u
        return EndoMatrix([[DEL_P**k if (i, j) == (r, c) else ZERO for j in range(n)] for i in range(n)])

    def residual(j):
        m = unit(units[j])
        out = []
        for tw in (A.alpha, A.beta):
            out.extend((m @ tw - tw @ m).rows)
        return [p for row in out for p in row]

    basis = []
    for vec in solve_kernel(len(units), residual):
        m = EndoMatrix.identity(n).scale(0)
        for u, c in zip(units, vec):
            if c:
                m = m + unit(u).scale(c)
        basis.append(m)
    return basis


def find_nijenhuis(
    A: ConformalAlgebra, degree_bound: int, coefficients: Sequence[int] = (-1, 0, 1), scalar: bool = False
) -> list[EndoMatrix]:
    """Nijenhuis operators among the combinations of ``twist_commutant_basis``
    with the given coefficients, in enumeration order.  Operators of the
    form ``p(del) id`` are skipped unless ``scalar`` is set."""
    basis = twist_commutant_basis(A, degree_bound)
    n = A.rank
    found = []
    for cs in product(coefficients, repeat=len(basis)):
        f = EndoMatrix.identity(n).scale(0)
        for m, c in zip(basis, cs):
            if c:
                f = f + m.scale(c)
        is_scalar = all(f.rows[i][j] == (f.rows[0][0] if i == j else ZERO) for i in range(n) for j in range(n))
        if is_scalar and not scalar:
            continue
        if check_nijenhuis(A, f).passed:
            found.append(f)
    return found
