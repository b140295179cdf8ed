"""Building new algebras: twisting, affinization, semidirect products and
one-dimensional derivation extensions."""

from __future__ import annotations

from itertools import product

from .core import (
    LAM,
    BiHomLieAlgebra,
    BilinearTable,
    ConformalAlgebra,
    ConformalModule,
    check_bihom_lie,
    check_conformal_algebra,
    check_module,
)
from .derivations import ConformalLinearMap
from .linalg import EndoMatrix, Vec
from .poly import DEL, ZERO, Poly

DEL_P = Poly.var(DEL)


class PreconditionError(ValueError):
    """An input violates a hypothesis of a construction."""


def _untwisted(A: ConformalAlgebra) -> ConformalAlgebra:
    n = A.rank
    return ConformalAlgebra(A.names, A.bracket, EndoMatrix.identity(n), EndoMatrix.identity(n))


def yau_twist(A: ConformalAlgebra, a: EndoMatrix, b: EndoMatrix) -> ConformalAlgebra:
    """Twist a Lie conformal algebra by commuting bracket endomorphisms
    ``a``, ``b``: ``[u_l v]' = [a(u)_l b(v)]`` with twists ``(a, b)``.

    The twists of ``A`` itself are ignored; its bracket must satisfy the
    untwisted axioms.
    """
    n = A.rank
    if a.n != n or b.n != n:
        raise PreconditionError("twist maps do not match rank")
    base = _untwisted(A)
    rep = check_conformal_algebra(base)
    if not rep.passed:
        f = rep.failures[0]
        raise PreconditionError(f"input is not a Lie conformal algebra: {f.tag} fails at {f.witness}")
    if a @ b != b @ a:
        raise PreconditionError("twist maps do not commute")
    E = A.basis()
    for name, m in (("a", a), ("b", b)):
        for i, j in product(range(n), repeat=2):
            if m.apply(A.br(E[i], E[j])) != A.br(m.apply(E[i]), m.apply(E[j])):
                raise PreconditionError(f"map {name} is not multiplicative at ({i}, {j})")
    aE = [a.apply(e) for e in E]
    bE = [b.apply(e) for e in E]
    entries = [[A.br(aE[i], bE[j], LAM) for j in range(n)] for i in range(n)]
    return ConformalAlgebra(A.names, BilinearTable(entries, n), a, b)


def affinize(L: BiHomLieAlgebra) -> ConformalAlgebra:
    """The conformal algebra free over Q[del] on L with constant brackets.

    Regularity is not required; ``is_regular`` of the result reports it.
    """
    rep = check_bihom_lie(L)
    if not rep.passed:
        f = rep.failures[0]
        raise PreconditionError(f"input fails the BiHom-Lie axioms: {f.tag} at {f.witness}")
    n = L.dim
    if n == 0:
        return ConformalAlgebra((), BilinearTable([], 0), EndoMatrix([]), EndoMatrix([]))
    return ConformalAlgebra(L.names, L.table(), EndoMatrix(L.alpha), EndoMatrix(L.beta))


def _joined_names(left, right) -> tuple:
    """Concatenate basis names, suffixing clashing right-hand names with ``_m``."""
    taken = set(left)
    out = list(left)
    for name in right:
        new = name
        while new in taken:
            new += "_m"
        taken.add(new)
        out.append(new)
    return tuple(out)


def semidirect_product(A: ConformalAlgebra, M: ConformalModule) -> ConformalAlgebra:
    """``A + M`` with ``[(a+u)_l (b+v)] = [a_l b] + a._l v - (a^-1 b)(b)._{-del-l} (aM bM^-1)(u)``."""
    if M.parent is not A:
        raise PreconditionError("module is over a different algebra")
    if not A.is_regular:
        raise PreconditionError("algebra twists must be invertible")
    if not (M.alpha.is_unit() and M.beta.is_unit()):
        raise PreconditionError("module twists must be invertible")
    rep = check_module(M)
    if not rep.passed:
        f = rep.failures[0]
        raise PreconditionError(f"not a module: {f.tag} fails at {f.witness}")
    n, m = A.rank, M.rank
    N = n + m
    EA, EM = A.basis(), M.basis()
    ab = A.alpha.inverse() @ A.beta
    twist_v = M.alpha @ M.beta.inverse()
    flip = -DEL_P - LAM

    def emb(v: Vec, offset: int) -> Vec:
        out = [ZERO] * N
        for k, p in enumerate(v.c):
            out[offset + k] = p
        return Vec(out)

    entries = [[Vec.zero(N)] * N for _ in range(N)]
    for i, j in product(range(n), repeat=2):
        entries[i][j] = emb(A.br(EA[i], EA[j], LAM), 0)
    for i, j in product(range(n), range(m)):
        entries[i][n + j] = emb(M.act(EA[i], EM[j], LAM), n)
    for i, j in product(range(m), range(n)):
        entries[n + i][j] = emb(-M.act(ab.apply(EA[j]), twist_v.apply(EM[i]), flip), n)
    return ConformalAlgebra(_joined_names(A.names, M.names), BilinearTable(entries, N), A.alpha.block_diag(M.alpha), A.beta.block_diag(M.beta))


def derivation_extension(A: ConformalAlgebra, D: ConformalLinearMap, name: str = "d") -> ConformalAlgebra:
    """Adjoin a free rank-one summand ``d`` with ``[d_l b] = D_l(b)`` and
    ``[a_l d] = -D_{-del-l}(alpha beta^-1 (a))``; ``d`` is fixed by both twists."""
    if not A.is_regular:
        raise PreconditionError("algebra twists must be invertible")
    if D.n != A.rank or D.var != 0:
        raise PreconditionError("map must be a rank-matching conformal linear map in l0")
    for tw in (A.alpha, A.beta):
        if D.compose_endo(tw) != D.endo_compose(tw):
            raise PreconditionError("map does not commute with the twists")
    if name in A.names:
        raise PreconditionError(f"name {name!r} already used")
    n = A.rank
    N = n + 1
    E = A.basis()
    ab = A.alpha @ A.beta.inverse()
    flip = -DEL_P - LAM

    def emb(v: Vec) -> Vec:
        return Vec(list(v.c) + [ZERO])

    entries = [[Vec.zero(N)] * N for _ in range(N)]
    for i, j in product(range(n), repeat=2):
        entries[i][j] = emb(A.br(E[i], E[j], LAM))
    for j in range(n):
        entries[n][j] = emb(D.apply(E[j], LAM))
        entries[j][n] = emb(-D.apply(ab.apply(E[j]), flip))
    one = EndoMatrix.identity(1)
    return ConformalAlgebra(
        tuple(A.names) + (name,), BilinearTable(entries, N), A.alpha.block_diag(one), A.beta.block_diag(one)
    )
