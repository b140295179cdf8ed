"""Pure-Python hot kernels.

Polynomial term tables are plain dicts mapping a packed monomial (an int
holding one 16-bit exponent field per variable) to a nonzero Fraction.
Packing makes monomial multiplication a single integer addition.

The compiled module ``_ckernels`` exposes exactly the same functions.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1


def mul_terms(a, b):
    """Product of two term tables."""
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            c = get(k)
            out[k] = ca * cb if c is None else c + ca * cb
    return {k: c for k, c in out.items() if c}


def add_terms(a, b, scale=1):
    """Return ``a + scale * b``."""
    out = dict(a)
    get = out.get
    if scale == 1:
        for k, c in b.items():
            s = get(k)
            out[k] = c if s is None else s + c
    else:
        for k, c in b.items():
            s = get(k)
            out[k] = c * scale if s is None else s + c * scale
    return {k: c for k, c in out.items() if c}


def _integer_row(row):
    den = 1
    for c in row.values():
        d = c.denominator
        den = den * d // gcd(den, d)
    out = {j: int(c * den) for j, c in row.items() if c}
    return _primitive(out)


def _primitive(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


def rref(rows, ncols):
    """Fraction-free reduced row echelon form.

    ``rows`` is a list of sparse rows ``{column: Fraction}``.  Returns
    ``(pivots, reduced)`` where ``reduced[r]`` is an integer row whose
    pivot column is ``pivots[r]``; every other reduced row is zero there.
    """
    work = [_integer_row(r) for r in rows if r]
    work = [r for r in work if r]
    pivots = []
    reduced = []
    for col in range(ncols):
        piv = None
        best = None
        for idx, r in enumerate(work):
            v = r.get(col)
            if v is not None and (best is None or len(r) < best):
                piv, best = idx, len(r)
        if piv is None:
            continue
        prow = work.pop(piv)
        p = prow[col]
        if p < 0:
            prow = {j: -v for j, v in prow.items()}
            p = -p
        nxt = []
        for r in work:
            v = r.get(col)
            if v is None:
                nxt.append(r)
                continue
            new = {j: x * p for j, x in r.items()}
            for j, x in prow.items():
                s = new.get(j, 0) - v * x
                if s:
                    new[j] = s
                else:
                    new.pop(j, None)
            if new:
                nxt.append(_primitive(new))
        work = nxt
        for i, r in enumerate(reduced):
            v = r.get(col)
            if v is None:
                continue
            new = {j: x * p for j, x in r.items()}
            for j, x in prow.items():
                s = new.get(j, 0) - v * x
                if s:
                    new[j] = s
                else:
                    new.pop(j, None)
            reduced[i] = _primitive(new)
        pivots.append(col)
        reduced.append(prow)
    return pivots, reduced


def nullspace(rows, ncols):
    """Basis of ``{x : rows @ x = 0}`` as a list of dense Fraction lists.

    One vector per free column, with a 1 in that column; the ordering is
    by free column, so the output is canonical for a given system.
    """
    pivots, reduced = rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for pc, r in zip(pivots, reduced):
            v = r.get(f)
            if v:
                vec[pc] = Fraction(-v, r[pc])
        basis.append(vec)
    return basis
