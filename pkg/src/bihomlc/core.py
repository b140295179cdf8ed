"""BiHom-Lie conformal algebras and modules on a finite free C[del]-basis.

Brackets are stored on basis pairs and extended by sesquilinearity::

    [f(del) e_i _x g(del) e_j] = f(-x) g(del + x) [e_i _x e_j]

where ``x`` is any polynomial spectral expression.  Expressions containing
``del`` (such as ``-del - l0``) are handled by the same simultaneous
substitution, which is the usual reading of ``[b_{-del-l} a]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .linalg import EndoMatrix, Vec, solve_kernel, vsum
from .poly import DEL, ZERO, Poly, slot

LAM = Poly.var(slot(0))
MU = Poly.var(slot(1))
DEL_P = Poly.var(DEL)


@dataclass(frozen=True)
class CheckFailure:
    tag: str
    witness: tuple[int, ...]
    residual: Vec
    detail: str = ""


@dataclass
class CheckReport:
    failures: list[CheckFailure] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, tag: str, witness: tuple[int, ...], residual: Vec, detail: str = "") -> None:
        self.failures.append(CheckFailure(tag, tuple(witness), residual, detail))

    def expect_equal(self, tag, witness, lhs: Vec, rhs: Vec, detail: str = "") -> None:
        r = lhs - rhs
        if not r.is_zero():
            self.fail(tag, witness, r, detail)

    def expect_zero(self, tag, witness, value: Vec, detail: str = "") -> None:
        if not value.is_zero():
            self.fail(tag, witness, value, detail)

    def tags(self) -> set[str]:
        return {f.tag for f in self.failures}

    def witnesses(self, tag: str) -> list[tuple[int, ...]]:
        return [f.witness for f in self.failures if f.tag == tag]

    def extend(self, other: "CheckReport", prefix: str = "") -> None:
        for f in other.failures:
            self.failures.append(CheckFailure(prefix + f.tag, f.witness, f.residual, f.detail))
        self.notes.extend(other.notes)


class BilinearTable:
    """Values of a sesquilinear map on basis pairs.

    ``entries[i][j]`` is a ``Vec`` of length ``n_out`` whose coefficients
    are polynomials in ``del`` and ``l0``.
    """

    def __init__(self, entries: Sequence[Sequence[Vec]], n_out: int):
        self.entries = tuple(tuple(row) for row in entries)
        self.n_left = len(self.entries)
        self.n_right = len(self.entries[0]) if self.entries else 0
        self.n_out = n_out
        for row in self.entries:
            if len(row) != self.n_right:
                raise ValueError("ragged bracket table")
            for v in row:
                if len(v) != n_out:
                    raise ValueError("bracket value has wrong length")
        self._nonzero = [
            (i, j, v) for i, row in enumerate(self.entries) for j, v in enumerate(row) if not v.is_zero()
        ]
        self._cache: dict[Poly, list] = {}

    @classmethod
    def zero(cls, n_left: int, n_right: int, n_out: int) -> "BilinearTable":
        return cls([[Vec.zero(n_out)] * n_right for _ in range(n_left)], n_out)

    def _at(self, x: Poly):
        got = self._cache.get(x)
        if got is None:
            got = [(i, j, v.subs({slot(0): x})) for i, j, v in self._nonzero]
            if len(self._cache) > 256:
                self._cache.clear()
            self._cache[x] = got
        return got

    def eval(self, a: Vec, b: Vec, x: Poly) -> Vec:
        if len(a) != self.n_left or len(b) != self.n_right:
            raise ValueError(
                f"shape mismatch: expected ({self.n_left}, {self.n_right}), got ({len(a)}, {len(b)})"
            )
        out = [ZERO] * self.n_out
        if not self._nonzero:
            return Vec(out)
        fa = [f.subs({DEL: -x}) if f else ZERO for f in a]
        gb = [g.subs({DEL: DEL_P + x}) if g else ZERO for g in b]
        for i, j, v in self._at(x):
            f, g = fa[i], gb[j]
            if not f or not g:
                continue
            coef = f * g
            for k, e in enumerate(v.c):
                if e:
                    out[k] = out[k] + e * coef
        return Vec(out)

    def is_zero(self) -> bool:
        return not self._nonzero

    def map_values(self, fn) -> "BilinearTable":
        new = [[fn(v) for v in row] for row in self.entries]
        return BilinearTable(new, len(new[0][0]) if new and new[0] else self.n_out)

    def __add__(self, other: "BilinearTable") -> "BilinearTable":
        return BilinearTable(
            [[u + v for u, v in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.n_out
        )

    def scale(self, c) -> "BilinearTable":
        return BilinearTable([[v * c for v in r] for r in self.entries], self.n_out)

    def __eq__(self, other):
        return isinstance(other, BilinearTable) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def max_degree(self) -> int:
        return max((v.total_degree() for _, _, v in self._nonzero), default=-1)


def table_from_tensor(tensor: Sequence[Sequence[Sequence]], n_out: int | None = None) -> BilinearTable:
    """``tensor[i][j][k]`` -> table with ``[e_i e_j] = sum_k tensor[i][j][k] e_k``."""
    rows = [[Vec(vals) for vals in row] for row in tensor]
    if n_out is None:
        n_out = len(rows[0][0]) if rows and rows[0] else 0
    return BilinearTable(rows, n_out)


def _check_endo_entries(m: EndoMatrix, name: str) -> None:
    for r in m.rows:
        for a in r:
            if a.variables() - {DEL}:
                raise ValueError(f"{name} entries must be polynomials in del only")


@dataclass(frozen=True, eq=False)
class ConformalAlgebra:
    names: tuple[str, ...]
    bracket: BilinearTable
    alpha: EndoMatrix
    beta: EndoMatrix

    def __post_init__(self):
        n = len(self.names)
        if self.bracket.n_left != n or self.bracket.n_right != n or self.bracket.n_out != n:
            raise ValueError("bracket table shape does not match rank")
        if self.alpha.n != n or self.beta.n != n:
            raise ValueError("twist matrices do not match rank")
        _check_endo_entries(self.alpha, "alpha")
        _check_endo_entries(self.beta, "beta")
        for _, _, v in self.bracket._nonzero:
            for p in v:
                if p.variables() - {DEL, slot(0)}:
                    raise ValueError("bracket polynomials may only use del and l0")

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def is_regular(self) -> bool:
        return self.alpha.is_unit() and self.beta.is_unit()

    def basis(self) -> list[Vec]:
        return [Vec.unit(self.rank, i) for i in range(self.rank)]

    def element(self, coeffs: Sequence) -> Vec:
        if len(coeffs) != self.rank:
            raise ValueError("rank mismatch")
        return Vec(coeffs)

    def br(self, a: Vec, b: Vec, x: Poly = LAM) -> Vec:
        return self.bracket.eval(a, b, x)

    def tensor(self) -> list[list[list[Poly]]]:
        return [[list(v.c) for v in row] for row in self.bracket.entries]

    def same_data(self, other: "ConformalAlgebra") -> bool:
        return (
            self.rank == other.rank
            and self.bracket == other.bracket
            and self.alpha == other.alpha
            and self.beta == other.beta
        )


@dataclass(frozen=True, eq=False)
class ConformalModule:
    parent: ConformalAlgebra
    names: tuple[str, ...]
    action: BilinearTable
    alpha: EndoMatrix
    beta: EndoMatrix

    def __post_init__(self):
        m = len(self.names)
        if self.action.n_left != self.parent.rank or self.action.n_right != m or self.action.n_out != m:
            raise ValueError("action table shape does not match ranks")
        if self.alpha.n != m or self.beta.n != m:
            raise ValueError("module twist matrices do not match rank")
        _check_endo_entries(self.alpha, "alphaM")
        _check_endo_entries(self.beta, "betaM")

    @property
    def rank(self) -> int:
        return len(self.names)

    def basis(self) -> list[Vec]:
        return [Vec.unit(self.rank, i) for i in range(self.rank)]

    def act(self, a: Vec, v: Vec, x: Poly = LAM) -> Vec:
        return self.action.eval(a, v, x)


@dataclass(frozen=True, eq=False)
class BiHomLieAlgebra:
    """Finite-dimensional BiHom-Lie algebra with rational structure constants."""

    names: tuple[str, ...]
    structure: tuple  # structure[i][j][k]
    alpha: tuple  # alpha[k][i]: coefficient of e_k in alpha(e_i)
    beta: tuple

    @classmethod
    def build(cls, names, structure, alpha, beta) -> "BiHomLieAlgebra":
        fr = lambda x: Fraction(x)  # noqa: E731
        return cls(
            tuple(names),
            tuple(tuple(tuple(fr(c) for c in cell) for cell in row) for row in structure),
            tuple(tuple(fr(c) for c in r) for r in alpha),
            tuple(tuple(fr(c) for c in r) for r in beta),
        )

    @property
    def dim(self) -> int:
        return len(self.names)

    def table(self) -> BilinearTable:
        n = self.dim
        if n == 0:
            return BilinearTable([], 0)
        return table_from_tensor([[list(self.structure[i][j]) for j in range(n)] for i in range(n)], n)


def apply_endo(E: EndoMatrix, a: Vec) -> Vec:
    return E.apply(a)


def endo_power_compose(A: ConformalAlgebra | ConformalModule, k: int, l: int) -> EndoMatrix:
    """Matrix of ``alpha^k beta^l``; negative powers need invertible twists."""
    try:
        return A.alpha.power(k) @ A.beta.power(l)
    except ValueError as exc:
        raise ValueError(f"alpha^{k} beta^{l} undefined: {exc}") from None


def bracket_eval(A: ConformalAlgebra, a: Vec, b: Vec, x: Poly = LAM) -> Vec:
    if len(a) != A.rank or len(b) != A.rank:
        raise ValueError("rank mismatch")
    return A.br(a, b, x)


def module_action_eval(M: ConformalModule, a: Vec, v: Vec, x: Poly = LAM) -> Vec:
    return M.act(a, v, x)


def _matrix_residual(m: EndoMatrix) -> Vec:
    return Vec(a for r in m.rows for a in r)


def check_conformal_algebra(A: ConformalAlgebra) -> CheckReport:
    rep = CheckReport(notes=["sesquilinearity holds by construction of the bracket extension"])
    n = A.rank
    al, be = A.alpha, A.beta
    E = A.basis()
    ab = al @ be
    if ab != be @ al:
        rep.fail("commute", (), _matrix_residual(ab - be @ al), "alpha*beta != beta*alpha")
    aE = [al.apply(e) for e in E]
    bE = [be.apply(e) for e in E]
    abE = [ab.apply(e) for e in E]
    for i, j in product(range(n), repeat=2):
        val = A.br(E[i], E[j])
        rep.expect_equal("multiplicativity", (i, j), al.apply(val), A.br(aE[i], aE[j]), "alpha")
        rep.expect_equal("multiplicativity", (i, j), be.apply(val), A.br(bE[i], bE[j]), "beta")
    for i, j in product(range(n), repeat=2):
        lhs = A.br(bE[i], aE[j], LAM)
        rhs = A.br(bE[j], aE[i], -DEL_P - LAM)
        rep.expect_zero("skew", (i, j), lhs + rhs)
    for i, j, k in product(range(n), repeat=3):
        lhs = A.br(abE[i], A.br(E[j], E[k], MU), LAM)
        rhs = A.br(A.br(bE[i], E[j], LAM), bE[k], LAM + MU) + A.br(bE[j], A.br(aE[i], E[k], LAM), MU)
        rep.expect_equal("jacobi", (i, j, k), lhs, rhs)
    return rep


def check_module(M: ConformalModule) -> CheckReport:
    rep = CheckReport(notes=["sesquilinearity and del-commutation hold by construction"])
    A = M.parent
    al, be = A.alpha, A.beta
    aM, bM = M.alpha, M.beta
    if aM @ bM != bM @ aM:
        rep.fail("module-commute", (), _matrix_residual(aM @ bM - bM @ aM))
    E = A.basis()
    V = M.basis()
    ab = al @ be
    for i, j in product(range(A.rank), range(M.rank)):
        val = M.act(E[i], V[j])
        rep.expect_equal("module-alpha", (i, j), aM.apply(val), M.act(al.apply(E[i]), aM.apply(V[j])))
        rep.expect_equal("module-beta", (i, j), bM.apply(val), M.act(be.apply(E[i]), bM.apply(V[j])))
    for i, j, k in product(range(A.rank), range(A.rank), range(M.rank)):
        lhs = M.act(ab.apply(E[i]), M.act(E[j], V[k], MU), LAM) - M.act(
            be.apply(E[j]), M.act(al.apply(E[i]), V[k], LAM), MU
        )
        rhs = M.act(A.br(be.apply(E[i]), E[j], LAM), bM.apply(V[k]), LAM + MU)
        rep.expect_equal("module-jacobi", (i, j, k), lhs, rhs)
    return rep


def adjoint_module(A: ConformalAlgebra) -> ConformalModule:
    return ConformalModule(A, A.names, A.bracket, A.alpha, A.beta)


def center(A: ConformalAlgebra, degree_bound: int) -> list[Vec]:
    """Two-sided center ``{a : [a_l e_j] = 0 = [e_j _l a]}`` up to del-degree D."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    n = A.rank
    unknowns = [(i, d) for i in range(n) for d in range(degree_bound + 1)]
    E = A.basis()

    def elem(u) -> Vec:
        i, d = u
        return Vec.unit(n, i, DEL_P**d)

    def residual(idx):
        a = elem(unknowns[idx])
        out = []
        for e in E:
            out.append(A.br(a, e))
            out.append(A.br(e, a))
        return out

    kernel = solve_kernel(len(unknowns), residual)
    return [vsum((elem(u) * c for u, c in zip(unknowns, vec) if c), n) for vec in kernel]


def check_bihom_lie(L: BiHomLieAlgebra) -> CheckReport:
    """The four BiHom-Lie axioms on all basis tuples, over Q."""
    rep = CheckReport()
    n = L.dim
    al = EndoMatrix(L.alpha) if n else EndoMatrix([])
    be = EndoMatrix(L.beta) if n else EndoMatrix([])
    if n == 0:
        return rep
    tbl = L.table()
    zero = ZERO

    def br(u, v):
        return tbl.eval(u, v, zero)

    if al @ be != be @ al:
        rep.fail("commute", (), _matrix_residual(al @ be - be @ al))
    E = [Vec.unit(n, i) for i in range(n)]
    aE = [al.apply(e) for e in E]
    bE = [be.apply(e) for e in E]
    b2E = [be.apply(v) for v in bE]
    for i, j in product(range(n), repeat=2):
        val = br(E[i], E[j])
        rep.expect_equal("multiplicativity", (i, j), al.apply(val), br(aE[i], aE[j]), "alpha")
        rep.expect_equal("multiplicativity", (i, j), be.apply(val), br(bE[i], bE[j]), "beta")
        rep.expect_zero("skew", (i, j), br(bE[i], aE[j]) + br(bE[j], aE[i]))
    for i, j, k in product(range(n), repeat=3):
        s = br(b2E[i], br(bE[j], aE[k])) + br(b2E[j], br(bE[k], aE[i])) + br(b2E[k], br(bE[i], aE[j]))
        rep.expect_zero("jacobi", (i, j, k), s)
    return rep
