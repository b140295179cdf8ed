"""Vectors and matrices over polynomial rings, plus exact kernels over Q.

``Vec`` holds the coordinates of an element of a free C[del]-module (or
of ``M[l0, l1, ...]``) on a fixed basis.  ``EndoMatrix`` is a square
matrix over Q[del]; column ``j`` is the image of basis vector ``j``.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import permutations
from typing import Callable, Iterable, Sequence

from .kernels import nullspace
from .poly import DEL, ONE, ZERO, Poly


class Vec:
    __slots__ = ("c",)

    def __init__(self, coeffs: Iterable):
        self.c = tuple(x if isinstance(x, Poly) else Poly(x) for x in coeffs)

    @classmethod
    def zero(cls, n: int) -> "Vec":
        return cls((ZERO,) * n)

    @classmethod
    def unit(cls, n: int, i: int, coeff: Poly | int = 1) -> "Vec":
        return cls(coeff if k == i else ZERO for k in range(n))

    def __len__(self):
        return len(self.c)

    def __iter__(self):
        return iter(self.c)

    def __getitem__(self, i):
        return self.c[i]

    def __add__(self, other: "Vec") -> "Vec":
        if len(other.c) != len(self.c):
            raise ValueError("vector length mismatch")
        return Vec(a + b for a, b in zip(self.c, other.c))

    def __sub__(self, other: "Vec") -> "Vec":
        if len(other.c) != len(self.c):
            raise ValueError("vector length mismatch")
        return Vec(a - b for a, b in zip(self.c, other.c))

    def __neg__(self) -> "Vec":
        return Vec(-a for a in self.c)

    def __mul__(self, s) -> "Vec":
        return Vec(a * s for a in self.c)

    __rmul__ = __mul__

    def subs(self, mapping) -> "Vec":
        return Vec(a.subs(mapping) for a in self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def total_degree(self) -> int:
        return max((a.total_degree() for a in self.c), default=-1)

    def concat(self, other: "Vec") -> "Vec":
        return Vec(self.c + other.c)

    def __eq__(self, other):
        return isinstance(other, Vec) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "Vec(" + ", ".join(str(a) for a in self.c) + ")"


def vsum(vectors: Iterable[Vec], n: int) -> Vec:
    out = [ZERO] * n
    for v in vectors:
        for i, a in enumerate(v.c):
            if a:
                out[i] = out[i] + a
    return Vec(out)


class EndoMatrix:
    """Square matrix with entries in Q[del]."""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(x if isinstance(x, Poly) else Poly(x) for x in r) for r in rows)
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("endomorphism matrix must be square")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def identity(cls, n: int) -> "EndoMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @classmethod
    def diag(cls, entries: Sequence) -> "EndoMatrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __matmul__(self, other: "EndoMatrix") -> "EndoMatrix":
        n = self.n
        if other.n != n:
            raise ValueError("dimension mismatch")
        return EndoMatrix(
            [[sum((self.rows[i][k] * other.rows[k][j] for k in range(n)), ZERO) for j in range(n)] for i in range(n)]
        )

    def apply(self, v: Vec) -> Vec:
        n = self.n
        if len(v) != n:
            raise ValueError(f"dimension mismatch: matrix {n}, vector {len(v)}")
        out = []
        for r in self.rows:
            acc = ZERO
            for a, x in zip(r, v.c):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return Vec(out)

    def column(self, j: int) -> Vec:
        return Vec(r[j] for r in self.rows)

    def is_identity(self) -> bool:
        return self == EndoMatrix.identity(self.n)

    def scale(self, c) -> "EndoMatrix":
        return EndoMatrix([[a * c for a in r] for r in self.rows])

    def __add__(self, other: "EndoMatrix") -> "EndoMatrix":
        return EndoMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "EndoMatrix") -> "EndoMatrix":
        return EndoMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __eq__(self, other):
        return isinstance(other, EndoMatrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "EndoMatrix(" + "; ".join(" ".join(str(a) for a in r) for r in self.rows) + ")"

    def det(self) -> Poly:
        return determinant(self.rows)

    def is_unit(self) -> bool:
        """Determinant is a nonzero constant, i.e. a unit of Q[del]."""
        d = self.det()
        return bool(d) and d.is_constant()

    def inverse(self) -> "EndoMatrix":
        """Adjugate over determinant; requires a constant nonzero determinant."""
        d = self.det()
        if not d or not d.is_constant():
            raise ValueError("matrix is not invertible over Q[del] (determinant not a nonzero constant)")
        n = self.n
        inv_d = Fraction(1) / d.constant_term()
        adj = [[ZERO] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                minor = [[self.rows[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
                cof = determinant(minor)
                adj[j][i] = cof if (i + j) % 2 == 0 else -cof
        return EndoMatrix([[a * inv_d for a in r] for r in adj])

    def power(self, k: int) -> "EndoMatrix":
        if k < 0:
            return self.inverse().power(-k)
        out = EndoMatrix.identity(self.n)
        base = self
        while k:
            if k & 1:
                out = out @ base
            k >>= 1
            if k:
                base = base @ base
        return out

    def commutes_with(self, other: "EndoMatrix") -> bool:
        return self @ other == other @ self

    def is_del_free(self) -> bool:
        return all(a.is_constant() for r in self.rows for a in r)

    def block_diag(self, other: "EndoMatrix") -> "EndoMatrix":
        n, m = self.n, other.n
        rows = [list(r) + [ZERO] * m for r in self.rows]
        rows += [[ZERO] * n + list(r) for r in other.rows]
        return EndoMatrix(rows)


def _perm_sign(p: Sequence[int]) -> int:
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def determinant(rows) -> Poly:
    n = len(rows)
    if n == 0:
        return ONE
    if n <= 3:
        total = ZERO
        for p in permutations(range(n)):
            term = ONE
            for i in range(n):
                term = term * rows[i][p[i]]
                if not term:
                    break
            if term:
                total = total + term if _perm_sign(p) > 0 else total - term
        return total
    total = ZERO
    for j in range(n):
        a = rows[0][j]
        if not a:
            continue
        minor = [[r[c] for c in range(n) if c != j] for r in rows[1:]]
        cof = a * determinant(minor)
        total = total + cof if j % 2 == 0 else total - cof
    return total


# -- exact kernels ---------------------------------------------------------


def _flatten(residual: Iterable) -> dict:
    """Map ``(position, monomial) -> coefficient`` over a list of Poly/Vec."""
    out = {}
    pos = 0
    for item in residual:
        polys = item.c if isinstance(item, Vec) else (item,)
        for p in polys:
            for k, c in p.raw_terms.items():
                out[(pos, k)] = c
            pos += 1
    return out


def solve_kernel(n_unknowns: int, residual_of_unit: Callable[[int], Iterable]) -> list[list[Fraction]]:
    """Kernel of a linear map given by its action on unit vectors.

    ``residual_of_unit(j)`` returns the residual list (Poly/Vec entries) of
    the ``j``-th unknown basis element; the map must be linear, so these
    are the columns of the system matrix.
    """
    rows: dict = {}
    for j in range(n_unknowns):
        for key, c in _flatten(residual_of_unit(j)).items():
            rows.setdefault(key, {})[j] = c
    ordered = [rows[k] for k in sorted(rows)]
    return nullspace(ordered, n_unknowns)


def in_span(vectors: Sequence[Sequence[Fraction]], target: Sequence[Fraction]) -> bool:
    """Exact membership of ``target`` in the Q-span of ``vectors``."""
    m = len(vectors)
    if not any(target):
        return True
    if m == 0:
        return False
    n = len(target)
    rows = []
    for i in range(n):
        row = {j: Fraction(vectors[j][i]) for j in range(m) if vectors[j][i]}
        if target[i]:
            row[m] = Fraction(target[i])
        if row:
            rows.append(row)
    # target in span iff some kernel vector has a nonzero last coordinate
    return any(v[m] for v in nullspace(rows, m + 1))


def rank(vectors: Sequence[Sequence[Fraction]]) -> int:
    from .kernels import rref

    if not vectors:
        return 0
    rows = [{j: Fraction(x) for j, x in enumerate(v) if x} for v in vectors]
    pivots, _ = rref(rows, len(vectors[0]))
    return len(pivots)


def flatten_polys(items: Iterable) -> dict:
    return _flatten(items)


def shift_del(p: Poly, x: Poly) -> Poly:
    """``p(del + x)``."""
    return p.subs({DEL: Poly.var(DEL) + x})
