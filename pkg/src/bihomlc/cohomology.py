"""Cochains of the basic complex, the differential d (and d_s), and
degree-truncated cocycle/coboundary counts.

An n-cochain is stored by its values on basis tuples; spectral slot k
(1-based) is the polynomial variable ``l<k>``.  Values on arbitrary
arguments follow from conformal antilinearity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Sequence

from .core import CheckReport, ConformalAlgebra, ConformalModule, adjoint_module
from .linalg import EndoMatrix, Vec, rank, solve_kernel
from .kernels import nullspace
from .poly import DEL, ZERO, Poly, slot

DEL_P = Poly.var(DEL)


def lam_k(k: int) -> Poly:
    """Spectral variable of cochain slot ``k`` (1-based)."""
    return Poly.var(slot(k))


@dataclass(frozen=True, eq=False)
class Cochain:
    module: ConformalModule
    arity: int
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        n, m, r = self.arity, self.module.rank, self.module.parent.rank
        allowed = {DEL} | {slot(k) for k in range(1, n + 1)}
        for idx, v in self.values.items():
            if len(idx) != n or any(not 0 <= i < r for i in idx):
                raise ValueError(f"bad basis tuple {idx} for arity {n}")
            if len(v) != m:
                raise ValueError("cochain value has wrong length")
            for p in v:
                if p.variables() - allowed:
                    raise ValueError(f"cochain value uses variables outside del, l1..l{n}")

    @property
    def algebra(self) -> ConformalAlgebra:
        return self.module.parent

    def value(self, idx: tuple) -> Vec:
        v = self.values.get(tuple(idx))
        return v if v is not None else Vec.zero(self.module.rank)

    def nonzero(self) -> dict:
        return {k: v for k, v in self.values.items() if not v.is_zero()}

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values.values())

    def __add__(self, other: "Cochain") -> "Cochain":
        keys = set(self.values) | set(other.values)
        return Cochain(self.module, self.arity, {k: self.value(k) + other.value(k) for k in keys})

    def scale(self, c) -> "Cochain":
        return Cochain(self.module, self.arity, {k: v * c for k, v in self.values.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-1)

    def equals(self, other: "Cochain") -> bool:
        return self.arity == other.arity and (self - other).is_zero()

    def max_degree(self) -> int:
        return max((v.total_degree() for v in self.values.values()), default=-1)


def zero_cochain(M: ConformalModule, n: int) -> Cochain:
    return Cochain(M, n, {})


def eval_cochain(g: Cochain, args: Sequence[Vec], xs: Sequence[Poly] | None = None) -> Vec:
    """Value of ``g`` on arbitrary arguments with spectral expressions ``xs``.

    A coefficient ``f(del)`` of argument ``k`` contributes ``f(-xs[k])``.
    """
    n = g.arity
    if len(args) != n:
        raise ValueError(f"cochain of arity {n} given {len(args)} arguments")
    if xs is None:
        xs = [lam_k(k) for k in range(1, n + 1)]
    m = g.module.rank
    if n == 0:
        return g.value(())
    pulled = [[f.subs({DEL: -x}) if f else ZERO for f in a] for a, x in zip(args, xs)]
    mapping = {slot(k + 1): xs[k] for k in range(n)}
    out = [ZERO] * m
    for idx, val in g.values.items():
        coef = None
        for k, i in enumerate(idx):
            f = pulled[k][i]
            if not f:
                coef = None
                break
            coef = f if coef is None else coef * f
        if coef is None or val.is_zero():
            continue
        sv = val.subs(mapping)
        for k, p in enumerate(sv.c):
            if p:
                out[k] = out[k] + p * coef
    return Vec(out)


def _skew_and_commute_residuals(g: Cochain):
    """Yield ``(tag, witness, residual)`` for the cochain conditions."""
    n = g.arity
    A = g.algebra
    M = g.module
    if n == 0:
        m = g.value(())
        yield "commutativity", (), M.alpha.apply(m) - m
        yield "commutativity", (), M.beta.apply(m) - m
        return
    al, be = A.alpha, A.beta
    E = A.basis()
    aE = [al.apply(e) for e in E]
    bE = [be.apply(e) for e in E]
    xs = [lam_k(k) for k in range(1, n + 1)]
    tuples = list(product(range(A.rank), repeat=n))
    for p in range(n - 1):
        swapped = list(xs)
        swapped[p], swapped[p + 1] = xs[p + 1], xs[p]
        for idx in tuples:
            args_l = [E[i] for i in idx]
            args_l[p], args_l[p + 1] = bE[idx[p + 1]], aE[idx[p]]
            args_r = [E[i] for i in idx]
            args_r[p], args_r[p + 1] = bE[idx[p]], aE[idx[p + 1]]
            r = eval_cochain(g, args_l, xs) + eval_cochain(g, args_r, swapped)
            yield "skew", (p,) + idx, r
    for idx in tuples:
        base = g.value(idx)
        yield "commutativity", idx, eval_cochain(g, [aE[i] for i in idx], xs) - M.alpha.apply(base)
        yield "commutativity", idx, eval_cochain(g, [bE[i] for i in idx], xs) - M.beta.apply(base)


def validate_cochain(g: Cochain) -> CheckReport:
    """Skew-symmetry (arguments and spectral slots exchanged together) and
    twist commutativity.  A 0-cochain must be fixed by both module twists."""
    rep = CheckReport()
    for tag, w, r in _skew_and_commute_residuals(g):
        rep.expect_zero(tag, w, r)
    return rep


def _require_regular(A: ConformalAlgebra) -> None:
    if not A.is_regular:
        raise ValueError("the differential needs a regular algebra (alpha, beta invertible over Q[del])")


def _differential(g: Cochain, s: int | None) -> Cochain:
    M = g.module
    A = g.algebra
    _require_regular(A)
    n = g.arity
    al, be = A.alpha, A.beta
    E = A.basis()
    if s is None:
        act_map = (al @ be.power(n - 1)) if n >= 1 else EndoMatrix.identity(A.rank)
        act = M.act
    else:
        act_map = (al.power(s + 1) @ be.power(n - 1)) if n >= 1 else al.power(s)
        act = A.br
    twisted = [act_map.apply(e) for e in E]
    inv_ab = al.inverse() @ be
    abE = [inv_ab.apply(e) for e in E]
    bE = [be.apply(e) for e in E]
    L = [None] + [lam_k(k) for k in range(1, n + 2)]
    inner_br: dict = {}
    values = {}
    for idx in product(range(A.rank), repeat=n + 1):
        total = Vec.zero(M.rank)
        for i in range(1, n + 2):
            rest = [E[idx[k - 1]] for k in range(1, n + 2) if k != i]
            xs = [L[k] for k in range(1, n + 2) if k != i]
            inner = eval_cochain(g, rest, xs)
            if inner.is_zero():
                continue
            term = act(twisted[idx[i - 1]], inner, L[i])
            total = total + term if (i + 1) % 2 == 0 else total - term
        for i in range(1, n + 2):
            for j in range(i + 1, n + 2):
                key = (idx[i - 1], idx[j - 1], i)
                first = inner_br.get(key)
                if first is None:
                    first = A.br(abE[idx[i - 1]], E[idx[j - 1]], L[i])
                    inner_br[key] = first
                if first.is_zero():
                    continue
                rest = [bE[idx[k - 1]] for k in range(1, n + 2) if k not in (i, j)]
                xs = [L[i] + L[j]] + [L[k] for k in range(1, n + 2) if k not in (i, j)]
                term = eval_cochain(g, [first] + rest, xs)
                total = total + term if (i + j) % 2 == 0 else total - term
        if not total.is_zero():
            values[idx] = total
    return Cochain(M, n + 1, values)


def differential(g: Cochain, check: bool = True) -> Cochain:
    """The differential d of the basic complex with coefficients in ``g.module``."""
    if check:
        rep = validate_cochain(g)
        if not rep.passed:
            f = rep.failures[0]
            raise ValueError(f"input is not a cochain: {f.tag} fails at {f.witness}")
    return _differential(g, None)


def differential_s(g: Cochain, s: int, check: bool = True) -> Cochain:
    """d_s on cochains with values in the adjoint module read as ``R_s``
    (action ``a . b = [alpha^s(a) _l b]``)."""
    A = g.algebra
    if g.module.action is not A.bracket and g.module.action != A.bracket:
        raise ValueError("d_s is defined for adjoint coefficients")
    if check:
        rep = validate_cochain(g)
        if not rep.passed:
            f = rep.failures[0]
            raise ValueError(f"input is not a cochain: {f.tag} fails at {f.witness}")
    return _differential(g, s)


def check_d_squared(g: Cochain, s: int | None = None) -> CheckReport:
    """d(d g) = 0, plus validity of d g as a cochain."""
    rep = CheckReport()
    dg = _differential(g, s)
    sub = validate_cochain(dg)
    rep.extend(sub, prefix="dgamma-")
    ddg = _differential(dg, s)
    for idx, v in sorted(ddg.nonzero().items()):
        rep.fail("d-squared", idx, v)
    return rep


def _monomials(nvars: int, degree_bound: int) -> list[tuple[int, ...]]:
    """Exponent tuples in ``nvars`` variables with total degree <= bound."""
    out = []
    for d in range(degree_bound + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            exps = [0] * nvars
            for v in combo:
                exps[v] += 1
            out.append(tuple(exps))
    return out


def _unit_cochains(A: ConformalAlgebra, M: ConformalModule, n: int, degree_bound: int):
    vars_ = [DEL] + [slot(k) for k in range(1, n + 1)]
    monos = _monomials(len(vars_), degree_bound)
    units = []
    for idx in product(range(A.rank), repeat=n):
        for k in range(M.rank):
            for exps in monos:
                units.append((idx, k, Poly.monomial(dict(zip(vars_, exps)))))
    return units


def _cochain_from_unit(M, n, unit) -> Cochain:
    idx, k, mono = unit
    return Cochain(M, n, {idx: Vec.unit(M.rank, k, mono)})


def _combine(M, n, units, coeffs) -> Cochain:
    values: dict = {}
    for (idx, k, mono), c in zip(units, coeffs):
        if not c:
            continue
        v = values.get(idx, Vec.zero(M.rank))
        values[idx] = v + Vec.unit(M.rank, k, mono * c)
    return Cochain(M, n, values)


def cochain_space_basis(A: ConformalAlgebra, M: ConformalModule, n: int, degree_bound: int) -> list[Cochain]:
    """Basis of arity-n cochains with value degree <= D satisfying the
    skew-symmetry and commutativity conditions."""
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    if M.parent is not A:
        raise ValueError("module is over a different algebra")
    units = _unit_cochains(A, M, n, degree_bound)

    def residual(j):
        g = _cochain_from_unit(M, n, units[j])
        return [r for _, _, r in _skew_and_commute_residuals(g)]

    kernel = solve_kernel(len(units), residual)
    return [_combine(M, n, units, vec) for vec in kernel]


@dataclass(frozen=True)
class TruncatedCohomology:
    arity: int
    degree_bound: int
    dim_cochains: int
    dim_cocycles: int
    dim_coboundaries_inside: int

    @property
    def defect(self) -> int:
        return self.dim_cocycles - self.dim_coboundaries_inside


def _flatten_cochain(g: Cochain) -> dict:
    out = {}
    for idx, v in g.values.items():
        for k, p in enumerate(v.c):
            for mono, c in p.raw_terms.items():
                out[(idx, k, mono)] = c
    return out


def _vectors(cochains: Sequence[Cochain]):
    flats = [_flatten_cochain(g) for g in cochains]
    keys = sorted({k for f in flats for k in f})
    pos = {k: i for i, k in enumerate(keys)}
    return keys, [[f.get(k, Fraction(0)) for k in keys] for f in flats], pos


def truncated_cohomology_report(
    A: ConformalAlgebra, M: ConformalModule, n: int, degree_bound: int, s: int | None = None
) -> TruncatedCohomology:
    """Cocycles, coboundaries landing in degree <= D, and their difference.

    This is a truncation: the defect bounds the dimension of the degree-D
    slice of H^n, it is not H^n itself.
    """
    _require_regular(A)
    d = (lambda g: _differential(g, s))
    basis_n = cochain_space_basis(A, M, n, degree_bound)
    images = [d(g) for g in basis_n]
    _, vecs, _ = _vectors(images)
    dim_cocycles = len(basis_n) - (rank(vecs) if vecs and vecs[0] else 0)
    dim_cob = 0
    if n >= 1:
        prev = cochain_space_basis(A, M, n - 1, degree_bound)
        cob = [d(g) for g in prev]
        keys, cvecs, _ = _vectors(cob)
        if cvecs and keys:
            high = [i for i, k in enumerate(keys) if _key_degree(k) > degree_bound]
            # combinations of coboundaries whose high-degree part cancels
            rows = []
            for i in high:
                row = {j: cvecs[j][i] for j in range(len(cob)) if cvecs[j][i]}
                if row:
                    rows.append(row)
            combos = nullspace(rows, len(cob))
            inside = []
            for c in combos:
                inside.append([sum((c[j] * cvecs[j][i] for j in range(len(cob))), Fraction(0)) for i in range(len(keys))])
            dim_cob = rank(inside) if inside else 0
    return TruncatedCohomology(n, degree_bound, len(basis_n), dim_cocycles, dim_cob)


def _key_degree(key) -> int:
    from .poly import _degree

    return _degree(key[2])


def bracket_cochain(A: ConformalAlgebra, symmetric_lift: bool = True) -> Cochain:
    """The bracket as a 2-cochain with adjoint coefficients.

    With ``symmetric_lift`` the spectral argument is ``(l1 - l2 - del)/2``;
    this agrees with ``[a_{l1} b]`` modulo ``del + l1 + l2`` and satisfies
    skew-symmetry in the unreduced complex.  Without it the value is the
    plain ``[a_{l1} b]``.
    """
    M = adjoint_module(A)
    l1, l2 = lam_k(1), lam_k(2)
    x = (l1 - l2 - DEL_P) * Fraction(1, 2) if symmetric_lift else l1
    values = {}
    for i, j in product(range(A.rank), repeat=2):
        v = A.bracket.entries[i][j].subs({slot(0): x})
        if not v.is_zero():
            values[(i, j)] = v
    return Cochain(M, 2, values)
