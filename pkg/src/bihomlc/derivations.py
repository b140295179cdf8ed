"""Conformal linear maps, twisted derivations and their generalizations.

A conformal linear map ``D`` of rank ``n`` is stored as a matrix of
polynomials in ``del`` and one spectral variable (its ``var`` slot,
``l0`` by default); column ``j`` is ``D_l(e_j)``.  Applying it follows the
rule ``D_x(f(del) e_j) = f(del + x) D_x(e_j)``.

In all map/bracket identities below the map variable is ``l0`` and the
bracket variable is ``l1``; commutator families use ``l0`` for the outer
parameter and ``l1`` for their own variable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Callable, Sequence

from .core import CheckReport, ConformalAlgebra, center, endo_power_compose
from .linalg import EndoMatrix, Vec, in_span, solve_kernel
from .poly import DEL, ZERO, Poly, slot

DEL_P = Poly.var(DEL)
L0, L1, L2, L3, L4 = (Poly.var(slot(i)) for i in range(5))

MapFn = Callable[[Vec, Poly], Vec]


class ConformalLinearMap:
    __slots__ = ("entries", "var", "_cache")

    def __init__(self, entries: Sequence[Sequence], var: int = 0):
        self.entries = tuple(tuple(x if isinstance(x, Poly) else Poly(x) for x in r) for r in entries)
        n = len(self.entries)
        if any(len(r) != n for r in self.entries):
            raise ValueError("conformal linear map matrix must be square")
        self.var = var
        self._cache: dict = {}

    @property
    def n(self) -> int:
        return len(self.entries)

    @classmethod
    def zero(cls, n: int) -> "ConformalLinearMap":
        return cls([[ZERO] * n for _ in range(n)])

    @classmethod
    def identity(cls, n: int) -> "ConformalLinearMap":
        return cls.from_endo(EndoMatrix.identity(n))

    @classmethod
    def from_endo(cls, E: EndoMatrix) -> "ConformalLinearMap":
        return cls(E.rows)

    @property
    def var_poly(self) -> Poly:
        return Poly.var(slot(self.var))

    def column(self, j: int) -> Vec:
        return Vec(r[j] for r in self.entries)

    def _at(self, x: Poly):
        got = self._cache.get(x)
        if got is None:
            if x == self.var_poly:
                got = self.entries
            else:
                m = {slot(self.var): x}
                got = tuple(tuple(p.subs(m) if p else p for p in r) for r in self.entries)
            self._cache[x] = got
        return got

    def apply(self, a: Vec, x: Poly | None = None) -> Vec:
        if len(a) != self.n:
            raise ValueError(f"dimension mismatch: map {self.n}, vector {len(a)}")
        if x is None:
            x = self.var_poly
        ent = self._at(x)
        shift = {DEL: DEL_P + x}
        g = [f.subs(shift) if f else ZERO for f in a.c]
        out = []
        for row in ent:
            acc = ZERO
            for e, h in zip(row, g):
                if e and h:
                    acc = acc + e * h
            out.append(acc)
        return Vec(out)

    __call__ = apply

    def partial(self) -> "ConformalLinearMap":
        """``(del D)_l = -l D_l``."""
        return self.scale_poly(-self.var_poly)

    def scale_poly(self, p: Poly) -> "ConformalLinearMap":
        return ConformalLinearMap([[a * p for a in r] for r in self.entries], self.var)

    def scale(self, c) -> "ConformalLinearMap":
        return ConformalLinearMap([[a * c for a in r] for r in self.entries], self.var)

    def __add__(self, other: "ConformalLinearMap") -> "ConformalLinearMap":
        self._same_shape(other)
        return ConformalLinearMap([[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.var)

    def __sub__(self, other: "ConformalLinearMap") -> "ConformalLinearMap":
        self._same_shape(other)
        return ConformalLinearMap([[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)], self.var)

    def __neg__(self) -> "ConformalLinearMap":
        return self.scale(-1)

    def _same_shape(self, other) -> None:
        if other.n != self.n or other.var != self.var:
            raise ValueError("conformal linear maps differ in rank or variable")

    def compose_endo(self, E: EndoMatrix) -> "ConformalLinearMap":
        """``D o E`` for a Q[del]-linear ``E``."""
        return ConformalLinearMap([list(c) for c in zip(*(self.apply(E.column(j)).c for j in range(self.n)))], self.var)

    def endo_compose(self, E: EndoMatrix) -> "ConformalLinearMap":
        """``E o D``."""
        cols = [E.apply(self.column(j)).c for j in range(self.n)]
        return ConformalLinearMap([list(r) for r in zip(*cols)], self.var)

    def is_zero(self) -> bool:
        return not any(a for r in self.entries for a in r)

    def max_degree(self) -> int:
        return max((a.total_degree() for r in self.entries for a in r), default=-1)

    def __eq__(self, other):
        return isinstance(other, ConformalLinearMap) and self.var == other.var and self.entries == other.entries

    def __hash__(self):
        return hash((self.var, self.entries))

    def __repr__(self):
        return "CLM(" + "; ".join(" ".join(str(a) for a in r) for r in self.entries) + ")"


# a commutator family is a map in l1 whose entries also depend on l0
CLMFamily = ConformalLinearMap


def clm_apply(D: ConformalLinearMap, a: Vec, x: Poly | None = None) -> Vec:
    return D.apply(a, x)


def clm_partial(D: ConformalLinearMap) -> ConformalLinearMap:
    return D.partial()


def commutator_apply(X: MapFn, Y: MapFn, lam: Poly) -> MapFn:
    """The map ``v, x -> X_lam(Y_{x-lam} v) - Y_{x-lam}(X_lam v)``."""

    def fn(v: Vec, x: Poly) -> Vec:
        return X(Y(v, x - lam), lam) - Y(X(v, lam), x - lam)

    return fn


def clm_commutator(D: ConformalLinearMap, E: ConformalLinearMap) -> ConformalLinearMap:
    """``[D_l0 E]`` as a family in ``l1`` with parameter ``l0``."""
    if D.n != E.n:
        raise ValueError("rank mismatch")
    if D.var != 0 or E.var != 0:
        raise ValueError("commutator inputs must be plain maps in l0")
    fn = commutator_apply(D, E, L0)
    cols = [fn(Vec.unit(D.n, j), L1).c for j in range(D.n)]
    return ConformalLinearMap([list(r) for r in zip(*cols)], var=1)


# -- identity residuals ----------------------------------------------------


def _twist(A: ConformalAlgebra, k: int, l: int) -> EndoMatrix:
    return endo_power_compose(A, k, l)


def _omega_residuals(A: ConformalAlgebra, fn: MapFn, x: Poly):
    """Commutation with both twists, per basis vector."""
    for name, tw in (("alpha", A.alpha), ("beta", A.beta)):
        for j, e in enumerate(A.basis()):
            yield name, (j,), fn(tw.apply(e), x) - tw.apply(fn(e, x))


def _left(A, fn, T, mv, bv, i, j):
    E = A.basis()
    return A.br(fn(E[i], mv), T.apply(E[j]), mv + bv)


def _right(A, fn, T, mv, bv, i, j):
    E = A.basis()
    return A.br(T.apply(E[i]), fn(E[j], mv), bv)


def _image(A, fn, mv, bv, i, j):
    E = A.basis()
    return fn(A.br(E[i], E[j], bv), mv)


def _leibniz_residuals(A: ConformalAlgebra, fn: MapFn, T: EndoMatrix, mv: Poly, bv: Poly):
    for i, j in product(range(A.rank), repeat=2):
        r = _image(A, fn, mv, bv, i, j) - _left(A, fn, T, mv, bv, i, j) - _right(A, fn, T, mv, bv, i, j)
        yield (i, j), r


def _map_vars(*maps: ConformalLinearMap) -> tuple[Poly, Poly]:
    """Map variable of the first map and a bracket variable unused by all."""
    used = {v for D in maps for r in D.entries for a in r for v in a.variables()}
    used |= {slot(D.var) for D in maps}
    fresh = max(v for v in used if v != DEL) + 1
    return maps[0].var_poly, Poly.var(fresh)


def derivation_report(A: ConformalAlgebra, fn: MapFn, k: int, l: int, mv: Poly, bv: Poly) -> CheckReport:
    rep = CheckReport()
    T = _twist(A, k, l)
    for name, w, r in _omega_residuals(A, fn, mv):
        rep.expect_zero("commute", w, r, name)
    for w, r in _leibniz_residuals(A, fn, T, mv, bv):
        rep.expect_zero("leibniz", w, r)
    return rep


def is_derivation(A: ConformalAlgebra, D: ConformalLinearMap, k: int, l: int) -> CheckReport:
    """Commutation with alpha, beta and the twisted Leibniz rule at bidegree (k, l)."""
    if D.n != A.rank:
        raise ValueError("rank mismatch")
    mv, bv = _map_vars(D)
    return derivation_report(A, D, k, l, mv, bv)


def inner_derivation(A: ConformalAlgebra, a: Vec, k: int, l: int) -> ConformalLinearMap:
    """``b -> [a_l0 alpha^(k+1) beta^(l-1) (b)]`` for ``a`` fixed by both twists."""
    if A.alpha.apply(a) != a or A.beta.apply(a) != a:
        raise ValueError("inner derivations need an element fixed by alpha and beta")
    if l == 0 and not A.beta.is_unit():
        raise ValueError("beta must be invertible for l = 0")
    T = _twist(A, k + 1, l - 1)
    cols = [A.br(a, T.apply(e), L0).c for e in A.basis()]
    return ConformalLinearMap([list(r) for r in zip(*cols)])


# -- linear solvers ---------------------------------------------------------


def _entry_monomials(degree_bound: int) -> list[Poly]:
    out = []
    for d in range(degree_bound + 1):
        for combo in combinations_with_replacement((DEL, slot(0)), d):
            exps: dict = {}
            for v in combo:
                exps[v] = exps.get(v, 0) + 1
            out.append(Poly.monomial(exps))
    return out


def _solve_maps(A: ConformalAlgebra, nmaps: int, degree_bound: int, residual) -> list[tuple[ConformalLinearMap, ...]]:
    """Kernel of a linear condition on ``nmaps`` unknown maps of degree <= D."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    n = A.rank
    monos = _entry_monomials(degree_bound)
    units = [(m, r, c, p) for m in range(nmaps) for r in range(n) for c in range(n) for p in monos]

    def unit_maps(u):
        m, r, c, p = u
        maps = [ConformalLinearMap.zero(n)] * nmaps
        ent = [[ZERO] * n for _ in range(n)]
        ent[r][c] = p
        maps[m] = ConformalLinearMap(ent)
        return maps

    kernel = solve_kernel(len(units), lambda j: residual(unit_maps(units[j])))
    out = []
    for vec in kernel:
        ents = [[[ZERO] * n for _ in range(n)] for _ in range(nmaps)]
        for (m, r, c, p), coef in zip(units, vec):
            if coef:
                ents[m][r][c] = ents[m][r][c] + p * coef
        out.append(tuple(ConformalLinearMap(e) for e in ents))
    return out


def solve_derivations(A: ConformalAlgebra, k: int, l: int, degree_bound: int) -> list[ConformalLinearMap]:
    """Basis of degree-truncated twisted derivations at bidegree (k, l)."""
    T = _twist(A, k, l)

    def residual(maps):
        (D,) = maps
        out = [r for _, _, r in _omega_residuals(A, D, L0)]
        out += [r for _, r in _leibniz_residuals(A, D, T, L0, L1)]
        return out

    return [m[0] for m in _solve_maps(A, 1, degree_bound, residual)]


# -- generalized derivations -------------------------------------------------

KINDS = ("gder", "qder", "centroid", "quasicentroid", "central")
_ARITY = {"gder": 3, "qder": 2, "centroid": 1, "quasicentroid": 1, "central": 1}


@dataclass(frozen=True, eq=False)
class GenDerWitness:
    kind: str
    maps: tuple
    k: int
    l: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        if len(self.maps) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} witness needs {_ARITY[self.kind]} maps")

    @property
    def map(self) -> ConformalLinearMap:
        return self.maps[0]


def _kind_residuals(A, kind, fns, T, mv, bv):
    """Yield ``(tag, witness, residual)`` for the defining identities."""
    for i, j in product(range(A.rank), repeat=2):
        if kind == "gder":
            D, D1, D2 = fns
            r = _left(A, D, T, mv, bv, i, j) + _right(A, D1, T, mv, bv, i, j) - _image(A, D2, mv, bv, i, j)
            yield "gder", (i, j), r
        elif kind == "qder":
            D, D1 = fns
            r = _left(A, D, T, mv, bv, i, j) + _right(A, D, T, mv, bv, i, j) - _image(A, D1, mv, bv, i, j)
            yield "qder", (i, j), r
        else:
            (D,) = fns
            left = _left(A, D, T, mv, bv, i, j)
            if kind == "centroid":
                right = _right(A, D, T, mv, bv, i, j)
                yield "centroid", (i, j), left - right
                yield "centroid", (i, j), right - _image(A, D, mv, bv, i, j)
            elif kind == "quasicentroid":
                yield "quasicentroid", (i, j), left - _right(A, D, T, mv, bv, i, j)
            else:
                yield "central", (i, j), left
                yield "central", (i, j), _image(A, D, mv, bv, i, j)


def kind_report(A: ConformalAlgebra, kind: str, fns: Sequence[MapFn], k: int, l: int, mv: Poly, bv: Poly) -> CheckReport:
    rep = CheckReport()
    T = _twist(A, k, l)
    for m, fn in enumerate(fns):
        for name, w, r in _omega_residuals(A, fn, mv):
            rep.expect_zero("commute", (m,) + w, r, name)
    for tag, w, r in _kind_residuals(A, kind, fns, T, mv, bv):
        rep.expect_zero(tag, w, r)
    return rep


def check_generalized(A: ConformalAlgebra, w: GenDerWitness) -> CheckReport:
    """Check the defining identities of ``w.kind`` for the witness maps."""
    if len({D.var for D in w.maps}) != 1:
        raise ValueError("witness maps must share their variable")
    mv, bv = _map_vars(*w.maps)
    return kind_report(A, w.kind, w.maps, w.k, w.l, mv, bv)


def solve_generalized(A: ConformalAlgebra, kind: str, k: int, l: int, degree_bound: int) -> list[GenDerWitness]:
    """Joint kernel over all maps of the witness, each required to commute
    with both twists."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    T = _twist(A, k, l)

    def residual(maps):
        out = []
        for D in maps:
            out += [r for _, _, r in _omega_residuals(A, D, L0)]
        out += [r for _, _, r in _kind_residuals(A, kind, maps, T, L0, L1)]
        return out

    return [GenDerWitness(kind, maps, k, l) for maps in _solve_maps(A, _ARITY[kind], degree_bound, residual)]


def _flatten_map(D: ConformalLinearMap) -> dict:
    out = {}
    for r, row in enumerate(D.entries):
        for c, p in enumerate(row):
            for mono, coef in p.raw_terms.items():
                out[(r, c, mono)] = coef
    return out


def clm_in_span(maps: Sequence[ConformalLinearMap], target: ConformalLinearMap) -> bool:
    """Exact Q-span membership."""
    flats = [_flatten_map(m) for m in maps]
    ft = _flatten_map(target)
    keys = sorted(set(ft).union(*flats) if flats else set(ft))
    return in_span([[f.get(k, Fraction(0)) for k in keys] for f in flats], [ft.get(k, Fraction(0)) for k in keys])


def span_basis(maps: Sequence[ConformalLinearMap]) -> list[ConformalLinearMap]:
    """A linearly independent subset with the same span, in input order."""
    out: list[ConformalLinearMap] = []
    for m in maps:
        if not m.is_zero() and not clm_in_span(out, m):
            out.append(m)
    return out


class DecompositionError(ArithmeticError):
    def __init__(self, message: str, report: CheckReport):
        super().__init__(message)
        self.report = report


def decompose_gder(A: ConformalAlgebra, w: GenDerWitness) -> tuple[GenDerWitness, GenDerWitness]:
    """Split a generalized derivation witness ``(D, D1, D2)`` into the
    quasiderivation ``((D + D1)/2, D2)`` and quasicentroid ``(D - D1)/2``.

    Both parts are verified; a failing verification raises
    ``DecompositionError`` carrying the report.
    """
    if w.kind != "gder":
        raise ValueError("decompose_gder needs a gder witness")
    D, D1, D2 = w.maps
    half = Fraction(1, 2)
    q = GenDerWitness("qder", ((D + D1).scale(half), D2), w.k, w.l)
    c = GenDerWitness("quasicentroid", ((D - D1).scale(half),), w.k, w.l)
    rep = CheckReport()
    rep.extend(check_generalized(A, q), prefix="qder-part-")
    rep.extend(check_generalized(A, c), prefix="quasicentroid-part-")
    if q.maps[0] + c.maps[0] != D:
        rep.fail("sum", (), Vec.zero(A.rank), "parts do not add up to D")
    if not rep.passed:
        f = rep.failures[0]
        raise DecompositionError(f"decomposition fails: {f.tag} at {f.witness}", rep)
    return q, c


# -- commutator structure ----------------------------------------------------


def _family_vars():
    # family parameter l0, family variable l1, bracket variable l2
    return L1, L2


def commutator_derivation_report(
    A: ConformalAlgebra, D: ConformalLinearMap, k: int, l: int, E: ConformalLinearMap, s: int, t: int
) -> CheckReport:
    """``[D_l0 E]`` satisfies the Leibniz rule at bidegree (k+s, l+t) with l0 formal."""
    F = clm_commutator(D, E)
    mv, bv = _family_vars()
    return derivation_report(A, F, k + s, l + t, mv, bv)


def commutator_kind_report(A: ConformalAlgebra, kind: str, D: ConformalLinearMap, E: ConformalLinearMap, k: int, l: int) -> CheckReport:
    """Single-map kinds (centroid, quasicentroid, central) for a commutator family."""
    if _ARITY[kind] != 1:
        raise ValueError("only single-map kinds apply to a bare commutator")
    F = clm_commutator(D, E)
    mv, bv = _family_vars()
    return kind_report(A, kind, (F,), k, l, mv, bv)


def check_der_bihom_structure(A: ConformalAlgebra, sample: Sequence[ConformalLinearMap]) -> CheckReport:
    """Skew-symmetry and the Jacobi identity of the commutator bracket with
    twists ``D -> D o alpha`` and ``D -> D o beta``, on all sample tuples,
    with every spectral variable formal.  This is a property check on a
    finite sample, not a proof."""
    rep = CheckReport()
    al, be = A.alpha, A.beta
    ap = [D.compose_endo(al) for D in sample]
    bp = [D.compose_endo(be) for D in sample]
    abp = [D.compose_endo(al @ be) for D in sample]
    E = A.basis()
    lam, mu, th = L1, L2, L3
    for i, D in enumerate(sample):
        if D.compose_endo(al).compose_endo(be) != D.compose_endo(be).compose_endo(al):
            rep.fail("commute", (i,), Vec.zero(A.rank))
    # skew: [b'(X)_l a'(Y)]_m = -[b'(Y)_{m-l} a'(X)]_m
    for i, j in product(range(len(sample)), repeat=2):
        f1 = commutator_apply(bp[i], ap[j], lam)
        f2 = commutator_apply(bp[j], ap[i], mu - lam)
        for c, e in enumerate(E):
            rep.expect_zero("skew", (i, j, c), f1(e, mu) + f2(e, mu))
    for i, j, m in product(range(len(sample)), repeat=3):
        inner = commutator_apply(sample[j], sample[m], mu)
        lhs = commutator_apply(abp[i], inner, lam)
        r1 = commutator_apply(bp[j], commutator_apply(ap[i], sample[m], lam), mu)
        r2 = commutator_apply(commutator_apply(bp[i], sample[j], lam), bp[m], lam + mu)
        for c, e in enumerate(E):
            rep.expect_zero("jacobi", (i, j, m, c), lhs(e, th) - r1(e, th) - r2(e, th))
    return rep


def _vec_in_span(vectors: Sequence[Vec], target: Vec) -> bool:
    def flat(v: Vec) -> dict:
        out = {}
        for k, p in enumerate(v.c):
            for mono, c in p.raw_terms.items():
                out[(k, mono)] = c
        return out

    fv = [flat(v) for v in vectors]
    ft = flat(target)
    keys = sorted(set(ft).union(*fv) if fv else set(ft))
    return in_span([[f.get(k, Fraction(0)) for k in keys] for f in fv], [ft.get(k, Fraction(0)) for k in keys])


def check_centroid_bracket_central(
    A: ConformalAlgebra, c: GenDerWitness, q: GenDerWitness, degree_bound: int
) -> CheckReport:
    """Every value of ``[c_l0 q]`` lies in the center (spanned up to the
    degree bound); with an empty center the family must vanish."""
    if c.kind != "centroid" or q.kind != "quasicentroid":
        raise ValueError("expects a centroid and a quasicentroid witness")
    if not (A.alpha.is_unit() and A.beta.is_unit()):
        raise ValueError("alpha and beta must be surjective")
    rep = CheckReport()
    F = clm_commutator(c.map, q.map)
    Z = center(A, degree_bound)
    rep.notes.append(f"center dimension at degree <= {degree_bound}: {len(Z)}")
    for j in range(A.rank):
        col = F.column(j)
        if not Z:
            rep.expect_zero("central-value", (j,), col)
            continue
        # split the value by monomials in l0, l1 and test each del-coefficient
        parts: dict = {}
        for k, p in enumerate(col.c):
            for mono, coef in p.raw_terms.items():
                rest, dpart = _split_del(mono)
                v = parts.setdefault(rest, [ZERO] * A.rank)
                v[k] = v[k] + Poly.monomial({DEL: dpart}) * coef
        for rest, v in sorted(parts.items()):
            if not _vec_in_span(Z, Vec(v)):
                rep.fail("central-value", (j,), Vec(v))
    return rep


def _split_del(mono: int) -> tuple[int, int]:
    from .kernels import EXP_MASK

    d = mono & EXP_MASK
    return mono & ~EXP_MASK, d


def quasicentroid_commutator_report(A: ConformalAlgebra, qc: Sequence[GenDerWitness]) -> CheckReport:
    """For quasicentroids with an empty center: pairwise commutator families
    are tested for the quasicentroid identity (closure) and for vanishing.
    A failure is recorded only if the set is closed yet some commutator is
    nonzero."""
    rep = CheckReport()
    closed = True
    nonzero = []
    for i, j in product(range(len(qc)), repeat=2):
        a, b = qc[i], qc[j]
        sub = commutator_kind_report(A, "quasicentroid", a.map, b.map, a.k + b.k, a.l + b.l)
        if not sub.passed:
            closed = False
        if not clm_commutator(a.map, b.map).is_zero():
            nonzero.append((i, j))
    rep.notes.append(f"closed under commutator: {closed}")
    rep.notes.append(f"nonzero commutators: {len(nonzero)}")
    if closed:
        for w in nonzero:
            rep.fail("quasicentroid-commutator", w, Vec.zero(A.rank))
    return rep
