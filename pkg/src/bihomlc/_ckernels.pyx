# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled versions of the hot kernels in ``_kernels_py``.

Same signatures and same results; term tables and rows stay Python dicts
because coefficients are arbitrary-precision rationals.
"""

from fractions import Fraction
from math import gcd


def mul_terms(dict a, dict b):
    cdef dict out = {}
    cdef object ka, kb, ca, cb, k, c
    if len(a) < len(b):
        a, b = b, a
    for kb, cb in b.items():
        for ka, ca in a.items():
            k = ka + kb
            c = out.get(k)
            if c is None:
                out[k] = ca * cb
            else:
                out[k] = c + ca * cb
    return {k: c for k, c in out.items() if c}


def add_terms(dict a, dict b, object scale=1):
    cdef dict out = dict(a)
    cdef object k, c, s
    if scale == 1:
        for k, c in b.items():
            s = out.get(k)
            out[k] = c if s is None else s + c
    else:
        for k, c in b.items():
            s = out.get(k)
            out[k] = c * scale if s is None else s + c * scale
    return {k: c for k, c in out.items() if c}


cdef dict _primitive(dict row):
    cdef object g = 0
    cdef object v
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {j: v // g for j, v in row.items()}
    return row


cdef dict _integer_row(dict row):
    cdef object den = 1
    cdef object c, d
    for c in row.values():
        d = c.denominator
        den = den * d // gcd(den, d)
    return _primitive({j: int(c * den) for j, c in row.items() if c})


cdef dict _eliminate(dict r, dict prow, object p, object v):
    cdef dict new = {j: x * p for j, x in r.items()}
    cdef object j, x, s
    for j, x in prow.items():
        s = new.get(j, 0) - v * x
        if s:
            new[j] = s
        else:
            new.pop(j, None)
    return new


def rref(list rows, Py_ssize_t ncols):
    cdef list work = []
    cdef list pivots = []
    cdef list reduced = []
    cdef list nxt
    cdef dict r, prow, new
    cdef Py_ssize_t col, idx, piv, best, i
    cdef object p, v
    for r in rows:
        if r:
            r = _integer_row(r)
            if r:
                work.append(r)
    for col in range(ncols):
        piv = -1
        best = -1
        for idx in range(len(work)):
            r = <dict>work[idx]
            if col in r and (best < 0 or len(r) < best):
                piv = idx
                best = len(r)
        if piv < 0:
            continue
        prow = work.pop(piv)
        p = prow[col]
        if p < 0:
            prow = {j: -x for j, x in prow.items()}
            p = -p
        nxt = []
        for r in work:
            v = r.get(col)
            if v is None:
                nxt.append(r)
                continue
            new = _eliminate(r, prow, p, v)
            if new:
                nxt.append(_primitive(new))
        work = nxt
        for i in range(len(reduced)):
            r = <dict>reduced[i]
            v = r.get(col)
            if v is None:
                continue
            reduced[i] = _primitive(_eliminate(r, prow, p, v))
        pivots.append(col)
        reduced.append(prow)
    return pivots, reduced


def nullspace(list rows, Py_ssize_t ncols):
    pivots, reduced = rref(rows, ncols)
    cdef set pivset = set(pivots)
    cdef list basis = []
    cdef list vec
    cdef Py_ssize_t f
    cdef dict r
    zero = Fraction(0)
    one = Fraction(1)
    for f in range(ncols):
        if f in pivset:
            continue
        vec = [zero] * ncols
        vec[f] = one
        for pc, r in zip(pivots, reduced):
            v = r.get(f)
            if v:
                vec[pc] = Fraction(-v, r[pc])
        basis.append(vec)
    return basis
