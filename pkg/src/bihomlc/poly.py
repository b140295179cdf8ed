"""Exact multivariate polynomials over the rationals.

Variables are small integers: ``DEL`` (the derivation), ``T`` (the formal
deformation parameter) and ``slot(i)`` for spectral parameters
``l0, l1, ...`` (``l0`` is the usual lambda, ``l1`` mu, ``l2`` gamma).
The fixed variable order is ``del < t < l0 < l1 < ...``.

Polynomials are immutable.  Text form::

    >>> str(parse_poly("(2/3)*del^2*l1 - l0"))
    '(2/3)*del^2*l1 - l0'
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .kernels import EXP_BITS, EXP_MASK, add_terms, mul_terms

DEL = 0
T = 1


def slot(i: int) -> int:
    if i < 0:
        raise ValueError(f"slot index must be nonnegative, got {i}")
    return 2 + i


def var_name(v: int) -> str:
    if v == DEL:
        return "del"
    if v == T:
        return "t"
    return f"l{v - 2}"


def _pack(exps: Iterable[int]) -> int:
    key = 0
    for v, e in enumerate(exps):
        if e < 0 or e > EXP_MASK:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (EXP_BITS * v)
    return key


def _unpack(key: int) -> list[int]:
    out = []
    while key:
        out.append(key & EXP_MASK)
        key >>= EXP_BITS
    return out


def _degree(key: int) -> int:
    d = 0
    while key:
        d += key & EXP_MASK
        key >>= EXP_BITS
    return d


Number = Union[int, Fraction]


class Poly:
    """Sparse polynomial: packed monomial -> nonzero Fraction."""

    __slots__ = ("_t", "_h")

    def __init__(self, value: Number | "Poly" = 0):
        if isinstance(value, Poly):
            self._t = value._t
        else:
            c = Fraction(value)
            self._t = {0: c} if c else {}
        self._h = None

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p._t = terms
        p._h = None
        return p

    @classmethod
    def var(cls, v: int) -> "Poly":
        return cls._raw({1 << (EXP_BITS * v): Fraction(1)})

    @classmethod
    def monomial(cls, exps: Mapping[int, int], coeff: Number = 1) -> "Poly":
        """``coeff * prod(v**e)`` from a ``{var: exponent}`` mapping."""
        c = Fraction(coeff)
        if not c:
            return cls._raw({})
        key = 0
        for v, e in exps.items():
            if e < 0 or e > EXP_MASK:
                raise ValueError(f"exponent {e} out of range")
            key += e << (EXP_BITS * v)
        return cls._raw({key: c})

    @classmethod
    def from_terms(cls, terms: Mapping[tuple, Number]) -> "Poly":
        """Build from ``{exponent tuple (del, t, l0, ...): coefficient}``."""
        out: dict = {}
        for exps, c in terms.items():
            k = _pack(exps)
            out[k] = out.get(k, 0) + Fraction(c)
        return cls._raw({k: c for k, c in out.items() if c})

    # -- inspection -------------------------------------------------------

    def terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in canonical order as ``(exponent tuple, coefficient)``."""
        return [(tuple(_unpack(k)), self._t[k]) for k in self._sorted_keys()]

    def _sorted_keys(self) -> list[int]:
        # graded, then lexicographic with del most significant
        def sort_key(k):
            exps = _unpack(k)
            return (-sum(exps), [-e for e in exps] + [0])

        return sorted(self._t, key=sort_key)

    @property
    def raw_terms(self) -> dict:
        return self._t

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    def total_degree(self) -> int:
        """Largest exponent sum; ``-1`` for the zero polynomial."""
        if not self._t:
            return -1
        return max(_degree(k) for k in self._t)

    def degree(self, v: int) -> int:
        if not self._t:
            return -1
        shift = EXP_BITS * v
        return max((k >> shift) & EXP_MASK for k in self._t)

    def variables(self) -> set[int]:
        out = set()
        for k in self._t:
            for v, e in enumerate(_unpack(k)):
                if e:
                    out.add(v)
        return out

    def is_constant(self) -> bool:
        return not self._t or (len(self._t) == 1 and 0 in self._t)

    def constant_term(self) -> Fraction:
        return self._t.get(0, Fraction(0))

    def coefficients_in(self, v: int) -> dict[int, "Poly"]:
        """Split as ``sum_e coeff_e * v**e``; returns ``{e: coeff_e}``."""
        shift = EXP_BITS * v
        out: dict[int, dict] = {}
        for k, c in self._t.items():
            e = (k >> shift) & EXP_MASK
            out.setdefault(e, {})[k - (e << shift)] = c
        return {e: Poly._raw(t) for e, t in sorted(out.items())}

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "Poly":
        if isinstance(other, Poly):
            return other
        if isinstance(other, (int, Fraction)):
            return Poly(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o._t:
            return self
        if not self._t:
            return o
        return Poly._raw(add_terms(self._t, o._t))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o._t:
            return self
        return Poly._raw(add_terms(self._t, o._t, -1))

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return Poly._raw({k: -c for k, c in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if not self._t or not other._t:
            return ZERO
        if len(other._t) == 1 and 0 in other._t:
            return self.scale(other._t[0])
        if len(self._t) == 1 and 0 in self._t:
            return other.scale(self._t[0])
        return Poly._raw(mul_terms(self._t, other._t))

    __rmul__ = __mul__

    def scale(self, c: Number) -> "Poly":
        c = Fraction(c)
        if not c:
            return ZERO
        if c == 1:
            return self
        return Poly._raw({k: v * c for k, v in self._t.items()})

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, e: int):
        if not isinstance(e, int) or e < 0:
            raise ValueError("only nonnegative integer powers")
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    # -- substitution -----------------------------------------------------

    def subs(self, mapping: Mapping[int, "Poly | Number"]) -> "Poly":
        """Simultaneous substitution ``{var: replacement}``."""
        if not self._t or not mapping:
            return self
        repl = {v: Poly._coerce(e) for v, e in mapping.items()}
        shifts = [(v, EXP_BITS * v, r) for v, r in repl.items()]
        mask = 0
        for v, s, _ in shifts:
            mask |= EXP_MASK << s
        powers: dict[tuple[int, int], Poly] = {}
        acc: dict = {}
        get = acc.get
        for k, c in self._t.items():
            if not k & mask:
                acc[k] = get(k, 0) + c
                continue
            term = Poly._raw({k & ~mask: c})
            for v, s, r in shifts:
                e = (k >> s) & EXP_MASK
                if e:
                    pw = powers.get((v, e))
                    if pw is None:
                        pw = r**e
                        powers[(v, e)] = pw
                    term = term * pw
                    if not term._t:
                        break
            for kk, cc in term._t.items():
                acc[kk] = get(kk, 0) + cc
        return Poly._raw({k: c for k, c in acc.items() if c})

    def substitute(self, v: int, e: "Poly | Number") -> "Poly":
        return self.subs({v: e})

    # -- comparison -------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._h is None:
            self._h = hash(frozenset(self._t.items()))
        return self._h

    # -- text -------------------------------------------------------------

    def __str__(self) -> str:
        if not self._t:
            return "0"
        parts = []
        for i, k in enumerate(self._sorted_keys()):
            c = self._t[k]
            neg = c < 0
            a = -c if neg else c
            factors = []
            for v, e in enumerate(_unpack(k)):
                if e == 1:
                    factors.append(var_name(v))
                elif e:
                    factors.append(f"{var_name(v)}^{e}")
            if a.denominator == 1:
                cs = str(a.numerator)
            else:
                cs = f"({a.numerator}/{a.denominator})"
            if factors:
                body = "*".join(factors) if a == 1 else cs + "*" + "*".join(factors)
            else:
                body = cs
            if i == 0:
                parts.append("-" + body if neg else body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r})"


ZERO = Poly._raw({})
ONE = Poly(1)


def D() -> Poly:
    return Poly.var(DEL)


def lam(i: int = 0) -> Poly:
    return Poly.var(slot(i))


def t_var() -> Poly:
    return Poly.var(T)


# -- parser ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(del|t|l\d+)(?![A-Za-z0-9_])|(\S))")


class PolySyntaxError(ValueError):
    def __init__(self, message: str, column: int):
        super().__init__(f"{message} at column {column}")
        self.column = column


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            if m.group(1) is not None:
                self.toks.append(("num", m.group(1), m.start(1)))
            elif m.group(2) is not None:
                self.toks.append(("var", m.group(2), m.start(2)))
            elif m.group(3) is not None:
                self.toks.append(("op", m.group(3), m.start(3)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", "", len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, s):
        tok = self.take()
        if tok[1] != s:
            raise PolySyntaxError(f"expected {s!r}, got {tok[1] or 'end of input'!r}", tok[2] + 1)

    def parse(self) -> Poly:
        p = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise PolySyntaxError(f"unexpected {tok[1]!r}", tok[2] + 1)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self) -> Poly:
        p = self.unary()
        while self.peek()[1] == "*" and self.peek()[0] == "op":
            self.take()
            p = p * self.unary()
        return p

    def unary(self) -> Poly:
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[0] == "op" and self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise PolySyntaxError("exponent must be a nonnegative integer", tok[2] + 1)
            base = base ** int(tok[1])
        return base

    def atom(self) -> Poly:
        tok = self.take()
        kind, s, col = tok
        if kind == "num":
            n = int(s)
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                d = self.take()
                if d[0] != "num" or int(d[1]) == 0:
                    raise PolySyntaxError("bad rational denominator", d[2] + 1)
                return Poly(Fraction(n, int(d[1])))
            return Poly(n)
        if kind == "var":
            if s == "del":
                return Poly.var(DEL)
            if s == "t":
                return Poly.var(T)
            return Poly.var(slot(int(s[1:])))
        if kind == "op" and s == "(":
            p = self.expr()
            self.expect(")")
            return p
        raise PolySyntaxError(f"unexpected {s or 'end of input'!r}", col + 1)


def parse_poly(text: str) -> Poly:
    """Parse the polynomial grammar (``p/q``, ``del``, ``t``, ``l<i>``, ``+ - * ^``, parentheses)."""
    return _Parser(text).parse()
