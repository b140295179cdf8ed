"""Line-oriented definition files: parsing into a ``Workspace`` and
rendering back.

Blocks start with a header line (``algebra``, ``bihom``, ``module``,
``clm``, ``cochain``); the following statement lines belong to the most
recent header.  ``#`` starts a comment and ``;`` separates statements on
one line.  Example::

    algebra tw rank 2 basis x y
      bracket x y -> (3) y
      bracket y x -> (-2) y
      alpha x: 1 0
      alpha y: 0 2
      beta x: 1 0
      beta y: 0 3
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Sequence

from .cohomology import Cochain
from .core import BiHomLieAlgebra, BilinearTable, ConformalAlgebra, ConformalModule
from .derivations import ConformalLinearMap
from .linalg import EndoMatrix, Vec
from .poly import DEL, ONE, ZERO, Poly, PolySyntaxError, parse_poly, slot

ERROR_CODES = ("syntax", "duplicate-name", "unresolved-reference", "rank-mismatch", "invalid-value")

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = re.compile(r"^(del|t|l\d+)$")
_HEADERS = ("algebra", "bihom", "module", "clm", "cochain")
_STATEMENTS = {
    "algebra": ("bracket", "alpha", "beta"),
    "bihom": ("bracket", "alpha", "beta"),
    "module": ("action", "alphaM", "betaM"),
    "clm": ("entry",),
    "cochain": ("value",),
}


class ParseError(ValueError):
    def __init__(self, code: str, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message} [{code}]")
        self.code = code
        self.message = message
        self.line = line
        self.column = column


@dataclass
class Workspace:
    algebras: dict = field(default_factory=dict)
    bihoms: dict = field(default_factory=dict)
    modules: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    cochains: dict = field(default_factory=dict)
    # name of the parent object for modules, maps and cochains
    parents: dict = field(default_factory=dict)

    def kinds(self):
        return (
            ("algebra", self.algebras),
            ("bihom", self.bihoms),
            ("module", self.modules),
            ("clm", self.maps),
            ("cochain", self.cochains),
        )

    def lookup(self, name: str, *kinds: str):
        """Return ``(kind, object)`` for the first kind holding ``name``."""
        for kind, table in self.kinds():
            if (not kinds or kind in kinds) and name in table:
                return kind, table[name]
        wanted = " or ".join(kinds) if kinds else "object"
        raise KeyError(f"no {wanted} named {name!r}")

    def merge(self, other: "Workspace") -> None:
        for (kind, mine), (_, theirs) in zip(self.kinds(), other.kinds()):
            for name, obj in theirs.items():
                if name in mine:
                    raise ParseError("duplicate-name", f"{kind} {name!r} defined twice", 0)
                mine[name] = obj
        self.parents.update(other.parents)

    def same_as(self, other: "Workspace") -> bool:
        for (_, mine), (_, theirs) in zip(self.kinds(), other.kinds()):
            if set(mine) != set(theirs):
                return False
        if self.parents != other.parents:
            return False
        for name, A in self.algebras.items():
            B = other.algebras[name]
            if A.names != B.names or not A.same_data(B):
                return False
        for name, L in self.bihoms.items():
            K = other.bihoms[name]
            if (L.names, L.structure, L.alpha, L.beta) != (K.names, K.structure, K.alpha, K.beta):
                return False
        for name, M in self.modules.items():
            N = other.modules[name]
            if (M.names, M.action, M.alpha, M.beta) != (N.names, N.action, N.alpha, N.beta):
                return False
        for name, D in self.maps.items():
            if D != other.maps[name]:
                return False
        for name, g in self.cochains.items():
            h = other.cochains[name]
            if g.arity != h.arity or g.nonzero() != h.nonzero():
                return False
        return True


# -- parsing helpers ------------------------------------------------------


def _poly(text: str, line: int, col: int, allowed: set) -> Poly:
    try:
        p = parse_poly(text)
    except PolySyntaxError as exc:
        raise ParseError("syntax", str(exc).rsplit(" at column", 1)[0], line, col + exc.column - 1) from None
    bad = p.variables() - allowed
    if bad:
        from .poly import var_name

        names = ", ".join(sorted(var_name(v) for v in bad))
        raise ParseError("invalid-value", f"variable(s) {names} not allowed here", line, col)
    return p


def _terms(text: str, names: tuple, line: int, col: int, allowed: set) -> Vec:
    """``(p) b1 + (q) b2 ...`` over the basis ``names``."""
    index = {n: i for i, n in enumerate(names)}
    out = [ZERO] * len(names)
    depth = 0
    start = 0
    pos = 0
    found = False
    while pos < len(text):
        ch = text[pos]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        m = _IDENT.match(text, pos) if depth == 0 and (pos == 0 or not (text[pos - 1].isalnum() or text[pos - 1] == "_")) else None
        if m is not None:
            word = m.group(0)
            if not _RESERVED.match(word):
                if word not in index:
                    raise ParseError("unresolved-reference", f"unknown basis element {word!r}", line, col + pos)
                coeff = text[start:pos].strip()
                if coeff.endswith("*"):
                    coeff = coeff[:-1].rstrip()
                if coeff in ("", "+"):
                    p = ONE
                elif coeff == "-":
                    p = -ONE
                else:
                    p = _poly(coeff, line, col + start + (len(text[start:pos]) - len(text[start:pos].lstrip())), allowed)
                out[index[word]] = out[index[word]] + p
                found = True
                start = m.end()
                pos = m.end()
                continue
            pos = m.end()
            continue
        pos += 1
    rest = text[start:].strip()
    if rest:
        if found:
            raise ParseError("syntax", f"trailing text {rest!r} after last basis element", line, col + start)
        if _poly(rest, line, col + start, allowed):
            raise ParseError("syntax", "coefficient without a basis element", line, col + start)
    elif not found:
        raise ParseError("syntax", "empty right-hand side", line, col)
    return Vec(out)


def parse_terms(text: str, names: Sequence[str], allow_del: bool = True) -> Vec:
    """Parse a single ``(p) b1 + ...`` expression, e.g. a command-line element."""
    return _terms(text, tuple(names), 1, 1, {DEL} if allow_del else set())


def _split_entries(text: str, line: int, col: int) -> list[tuple[str, int]]:
    """Whitespace-separated entries at parenthesis depth 0."""
    out = []
    depth = 0
    cur = ""
    cur_start = 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("syntax", "unbalanced ')'", line, col + i)
        if ch.isspace() and depth == 0:
            if cur:
                out.append((cur, cur_start))
                cur = ""
            continue
        if not cur:
            cur_start = i
        cur += ch
    if depth:
        raise ParseError("syntax", "unbalanced '('", line, col + len(text))
    if cur:
        out.append((cur, cur_start))
    return out


def _basis_ref(word: str, names: tuple, line: int, col: int) -> int:
    if word.isdigit():
        k = int(word)
        if not 1 <= k <= len(names):
            raise ParseError("rank-mismatch", f"index {k} out of range 1..{len(names)}", line, col)
        return k - 1
    if word not in names:
        raise ParseError("unresolved-reference", f"unknown basis element {word!r}", line, col)
    return names.index(word)


@dataclass
class _Block:
    kind: str
    name: str
    line: int
    header: dict
    stmts: list = field(default_factory=list)  # (keyword, rest, line, col)


def _words(text: str):
    return [(m.group(0), m.start()) for m in re.finditer(r"\S+", text)]


def _parse_header(kind: str, text: str, line: int, indent: int) -> tuple[_Block, str | None, int]:
    words = _words(text)
    col = lambda i: indent + words[i][1] + 1 if i < len(words) else indent + len(text) + 1  # noqa: E731

    def expect(i, kw):
        if i >= len(words) or words[i][0] != kw:
            got = words[i][0] if i < len(words) else "end of line"
            raise ParseError("syntax", f"expected {kw!r}, got {got!r}", line, col(i))

    def ident(i, what):
        if i >= len(words):
            raise ParseError("syntax", f"missing {what}", line, col(i))
        w = words[i][0]
        if not _IDENT.fullmatch(w) or _RESERVED.match(w):
            raise ParseError("syntax", f"bad {what} {w!r}", line, col(i))
        return w

    def integer(i, what):
        if i >= len(words) or not words[i][0].isdigit():
            raise ParseError("syntax", f"expected {what}", line, col(i))
        return int(words[i][0])

    name = ident(1, "name")
    header: dict = {}
    rest_at = None
    if kind in ("algebra", "bihom", "module"):
        i = 2
        if kind == "module":
            expect(2, "over")
            header["over"] = (ident(3, "algebra name"), col(3))
            i = 4
        size_kw = "dim" if kind == "bihom" else "rank"
        expect(i, size_kw)
        n = integer(i + 1, size_kw)
        expect(i + 2, "basis")
        basis = []
        for j in range(i + 3, len(words)):
            b = ident(j, "basis name")
            if b in basis:
                raise ParseError("duplicate-name", f"basis name {b!r} repeated", line, col(j))
            basis.append(b)
        if len(basis) != n:
            raise ParseError("rank-mismatch", f"{size_kw} {n} but {len(basis)} basis names", line, col(i + 1))
        header["basis"] = tuple(basis)
    elif kind == "clm":
        expect(2, "over")
        header["over"] = (ident(3, "algebra name"), col(3))
        rest_at = 4
    else:
        expect(2, "over")
        header["over"] = (ident(3, "module name"), col(3))
        expect(4, "arity")
        header["arity"] = integer(5, "arity")
        rest_at = 6
    rest = None
    rest_col = 0
    if rest_at is not None and rest_at < len(words):
        off = words[rest_at][1]
        rest = text[off:]
        rest_col = indent + off
    return _Block(kind, name, line, header), rest, rest_col


def _statements(text: str, line: int, base_col: int):
    """Split a line on ';' and yield ``(keyword, rest, column_of_rest)``."""
    pos = 0
    for piece in text.split(";"):
        stripped = piece.lstrip()
        lead = len(piece) - len(stripped)
        if stripped.strip():
            m = re.match(r"\S+", stripped)
            kw = m.group(0)
            rest = stripped[m.end():]
            yield kw, rest, line, base_col + pos + lead + m.end() + 1, base_col + pos + lead + 1
        pos += len(piece) + 1


def _collect(text: str) -> list[_Block]:
    blocks: list[_Block] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].rstrip()
        if not body.strip():
            continue
        indent = len(body) - len(body.lstrip())
        stripped = body.strip()
        first = stripped.split()[0]
        if first in _HEADERS:
            block, rest, rest_col = _parse_header(first, stripped, lineno, indent)
            blocks.append(block)
            if rest is not None:
                for st in _statements(rest, lineno, rest_col):
                    _add_stmt(block, st)
            continue
        if not blocks:
            raise ParseError("syntax", f"statement {first!r} before any definition header", lineno, indent + 1)
        for st in _statements(stripped, lineno, indent):
            _add_stmt(blocks[-1], st)
    return blocks


def _add_stmt(block: _Block, st) -> None:
    kw, rest, line, col, kw_col = st
    if kw not in _STATEMENTS[block.kind]:
        raise ParseError("syntax", f"unexpected {kw!r} in {block.kind} block", line, kw_col)
    block.stmts.append((kw, rest, line, col))


# -- building objects ---------------------------------------------------------

_BRACKET_VARS = {DEL, slot(0)}
_TWIST_VARS = {DEL}


def _arrow(rest: str, line: int, col: int):
    if "->" not in rest:
        raise ParseError("syntax", "expected '->'", line, col + len(rest))
    left, right = rest.split("->", 1)
    lw = _words(left)
    if len(lw) != 2:
        raise ParseError("syntax", "expected two basis elements before '->'", line, col)
    return lw, right, col + len(left) + 2


def _twist_rows(stmts, kw, names, line0, allowed=_TWIST_VARS):
    n = len(names)
    rows: dict = {}
    for k, rest, line, col in stmts:
        if k != kw:
            continue
        if ":" not in rest:
            raise ParseError("syntax", "expected ':' after row label", line, col + len(rest))
        label, vals = rest.split(":", 1)
        lw = label.strip()
        r = _basis_ref(lw, names, line, col)
        if r in rows:
            raise ParseError("syntax", f"row {lw!r} of {kw} given twice", line, col)
        vcol = col + len(label) + 1
        ents = _split_entries(vals, line, vcol)
        if len(ents) != n:
            raise ParseError("rank-mismatch", f"{kw} row has {len(ents)} entries, expected {n}", line, vcol)
        rows[r] = [_poly(e, line, vcol + c, allowed) for e, c in ents]
    if not rows:
        return EndoMatrix.identity(n)
    if len(rows) != n:
        raise ParseError("rank-mismatch", f"{kw} has {len(rows)} rows, expected {n}", line0)
    return EndoMatrix([rows[r] for r in range(n)])


def _table(stmts, kw, left_names, right_names, out_names, allowed):
    entries = [[Vec.zero(len(out_names)) for _ in right_names] for _ in left_names]
    seen = set()
    for k, rest, line, col in stmts:
        if k != kw:
            continue
        lw, right, rcol = _arrow(rest, line, col)
        i = _basis_ref(lw[0][0], left_names, line, col + lw[0][1])
        j = _basis_ref(lw[1][0], right_names, line, col + lw[1][1])
        if (i, j) in seen:
            raise ParseError("syntax", f"{kw} for ({lw[0][0]}, {lw[1][0]}) given twice", line, col)
        seen.add((i, j))
        entries[i][j] = _terms(right, out_names, line, rcol, allowed)
    return BilinearTable(entries, len(out_names))


def _build_algebra(b: _Block) -> ConformalAlgebra:
    names = b.header["basis"]
    tbl = _table(b.stmts, "bracket", names, names, names, _BRACKET_VARS)
    al = _twist_rows(b.stmts, "alpha", names, b.line)
    be = _twist_rows(b.stmts, "beta", names, b.line)
    return ConformalAlgebra(names, tbl, al, be)


def _build_bihom(b: _Block) -> BiHomLieAlgebra:
    names = b.header["basis"]
    tbl = _table(b.stmts, "bracket", names, names, names, set())
    al = _twist_rows(b.stmts, "alpha", names, b.line, set())
    be = _twist_rows(b.stmts, "beta", names, b.line, set())
    n = len(names)
    const = lambda p: p.constant_term()  # noqa: E731
    structure = [[[const(tbl.entries[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]
    return BiHomLieAlgebra.build(
        names, structure, [[const(p) for p in r] for r in al.rows], [[const(p) for p in r] for r in be.rows]
    )


def _resolve(table: dict, name_col, kind: str, line: int):
    name, col = name_col
    if name not in table:
        raise ParseError("unresolved-reference", f"unknown {kind} {name!r}", line, col)
    return table[name]


def parse_definitions(text: str) -> Workspace:
    """Parse definition text into a ``Workspace`` (shape checks only)."""
    blocks = _collect(text)
    W = Workspace()
    tables = dict(W.kinds())
    for b in blocks:
        if b.name in tables[b.kind]:
            raise ParseError("duplicate-name", f"{b.kind} {b.name!r} defined twice", b.line, 1)
        tables[b.kind][b.name] = None
    for kind in _HEADERS:
        for b in (x for x in blocks if x.kind == kind):
            if kind == "algebra":
                obj = _build_algebra(b)
            elif kind == "bihom":
                obj = _build_bihom(b)
            elif kind == "module":
                A = _resolve(W.algebras, b.header["over"], "algebra", b.line)
                names = b.header["basis"]
                act = _table(b.stmts, "action", A.names, names, names, _BRACKET_VARS)
                am = _twist_rows(b.stmts, "alphaM", names, b.line)
                bm = _twist_rows(b.stmts, "betaM", names, b.line)
                obj = ConformalModule(A, names, act, am, bm)
                W.parents[("module", b.name)] = b.header["over"][0]
            elif kind == "clm":
                A = _resolve(W.algebras, b.header["over"], "algebra", b.line)
                obj = _build_clm(b, A)
                W.parents[("clm", b.name)] = b.header["over"][0]
            else:
                M = _resolve(W.modules, b.header["over"], "module", b.line)
                obj = _build_cochain(b, M)
                W.parents[("cochain", b.name)] = b.header["over"][0]
            tables[kind][b.name] = obj
    return W


def _build_clm(b: _Block, A: ConformalAlgebra) -> ConformalLinearMap:
    n = A.rank
    ent = [[ZERO] * n for _ in range(n)]
    seen = set()
    for _, rest, line, col in b.stmts:
        if ":" not in rest:
            raise ParseError("syntax", "expected ':' after entry indices", line, col + len(rest))
        label, val = rest.split(":", 1)
        lw = _words(label)
        if len(lw) != 2:
            raise ParseError("syntax", "entry needs a row and a column", line, col)
        k = _basis_ref(lw[0][0], A.names, line, col + lw[0][1])
        j = _basis_ref(lw[1][0], A.names, line, col + lw[1][1])
        if (k, j) in seen:
            raise ParseError("syntax", "entry given twice", line, col)
        seen.add((k, j))
        ent[k][j] = _poly(val, line, col + len(label) + 1, _BRACKET_VARS)
    return ConformalLinearMap(ent)


def _build_cochain(b: _Block, M: ConformalModule) -> Cochain:
    n = b.header["arity"]
    A = M.parent
    allowed = {DEL} | {slot(k) for k in range(1, n + 1)}
    values = {}
    for _, rest, line, col in b.stmts:
        m = re.match(r"\s*\(([^)]*)\)\s*:", rest)
        if m is None:
            raise ParseError("syntax", "expected '(indices):'", line, col)
        inner = m.group(1)
        parts = [p.strip() for p in inner.split(",")] if inner.strip() else []
        if len(parts) != n:
            raise ParseError("rank-mismatch", f"value tuple has {len(parts)} entries, arity is {n}", line, col)
        idx = tuple(_basis_ref(p, A.names, line, col + m.start(1)) for p in parts)
        if idx in values:
            raise ParseError("syntax", "value given twice", line, col)
        values[idx] = _terms(rest[m.end():], M.names, line, col + m.end(), allowed)
    return Cochain(M, n, values)


# -- rendering ----------------------------------------------------------------


def _entry(p: Poly) -> str:
    s = str(p)
    return f"({s})" if " " in s else s


def render_terms(v: Vec, names) -> str:
    parts = []
    for p, name in zip(v.c, names):
        if p:
            parts.append(name if p == ONE else f"({p}) {name}")
    return " + ".join(parts) if parts else "0"


def _render_rows(kw: str, E: EndoMatrix, names) -> list[str]:
    return [f"  {kw} {names[r]}: " + " ".join(_entry(p) for p in row) for r, row in enumerate(E.rows)]


def _render_table(kw, tbl: BilinearTable, left, right, out) -> list[str]:
    lines = []
    for i, j, v in tbl._nonzero:
        lines.append(f"  {kw} {left[i]} {right[j]} -> {render_terms(v, out)}")
    return lines


def render_algebra(name: str, A: ConformalAlgebra) -> str:
    lines = [f"algebra {name} rank {A.rank} basis " + " ".join(A.names)]
    lines += _render_table("bracket", A.bracket, A.names, A.names, A.names)
    lines += _render_rows("alpha", A.alpha, A.names)
    lines += _render_rows("beta", A.beta, A.names)
    return "\n".join(lines).rstrip() + "\n"


def render_bihom(name: str, L: BiHomLieAlgebra) -> str:
    lines = [f"bihom {name} dim {L.dim} basis " + " ".join(L.names)]
    if L.dim:
        lines += _render_table("bracket", L.table(), L.names, L.names, L.names)
        lines += _render_rows("alpha", EndoMatrix(L.alpha), L.names)
        lines += _render_rows("beta", EndoMatrix(L.beta), L.names)
    return "\n".join(lines) + "\n"


def render_module(name: str, over: str, M: ConformalModule) -> str:
    lines = [f"module {name} over {over} rank {M.rank} basis " + " ".join(M.names)]
    lines += _render_table("action", M.action, M.parent.names, M.names, M.names)
    lines += _render_rows("alphaM", M.alpha, M.names)
    lines += _render_rows("betaM", M.beta, M.names)
    return "\n".join(lines) + "\n"


def render_clm(name: str, over: str, D: ConformalLinearMap, names) -> str:
    lines = [f"clm {name} over {over}"]
    for k, row in enumerate(D.entries):
        for j, p in enumerate(row):
            if p:
                lines.append(f"  entry {names[k]} {names[j]}: {p}")
    return "\n".join(lines) + "\n"


def render_cochain(name: str, over: str, g: Cochain) -> str:
    lines = [f"cochain {name} over {over} arity {g.arity}"]
    anames = g.algebra.names
    for idx, v in sorted(g.nonzero().items()):
        lines.append(f"  value ({', '.join(anames[i] for i in idx)}): {render_terms(v, g.module.names)}")
    return "\n".join(lines) + "\n"


def render(W: Workspace) -> str:
    chunks = []
    for name, L in W.bihoms.items():
        chunks.append(render_bihom(name, L))
    for name, A in W.algebras.items():
        chunks.append(render_algebra(name, A))
    for name, M in W.modules.items():
        chunks.append(render_module(name, W.parents[("module", name)], M))
    for name, D in W.maps.items():
        over = W.parents[("clm", name)]
        chunks.append(render_clm(name, over, D, W.algebras[over].names))
    for name, g in W.cochains.items():
        chunks.append(render_cochain(name, W.parents[("cochain", name)], g))
    return "\n".join(chunks)
