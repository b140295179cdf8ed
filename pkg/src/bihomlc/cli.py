"""Command-line entry point.

    bihomlc [-f FILE ...] [--format json|text] <command> <names...> [options]

Without ``-f`` the shipped example definitions are loaded.  Every command
produces one report; the exit status is 0 if the report has no failures,
1 if some check failed and 2 for usage, parse or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Any, Sequence

from . import cohomology as coh
from . import constructions as cons
from . import deformation as dfm
from . import derivations as der
from .core import CheckReport, ConformalAlgebra, ConformalModule, adjoint_module, center, check_bihom_lie
from .core import check_conformal_algebra, check_module
from .linalg import EndoMatrix, Vec
from .poly import slot
from .textformat import ParseError, Workspace, parse_definitions, parse_terms, render_algebra, render_cochain
from .textformat import render_terms

SCHEMA = "bihomlc-report/1"

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

COMMANDS = (
    "check",
    "check-module",
    "check-bihom-lie",
    "twist",
    "affinize",
    "semidirect",
    "extend-derivation",
    "d",
    "d2-check",
    "cochain-basis",
    "cohomology-report",
    "nijenhuis-check",
    "deform",
    "triviality-check",
    "derivations",
    "inner",
    "gder",
    "decompose-gder",
    "centroid-check",
    "center",
)


class UsageError(ValueError):
    pass


@dataclass
class Report:
    command: str
    target: list[str]
    failures: list[dict] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def absorb(self, rep: CheckReport, out_names: Sequence[str], context: str = "") -> None:
        for f in rep.failures:
            entry = {"tag": f.tag, "witness": list(f.witness), "residual": render_terms(f.residual, out_names)}
            if f.detail:
                entry["detail"] = f.detail
            if context:
                entry["context"] = context
            self.failures.append(entry)
        self.notes.extend(rep.notes)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": self.command,
            "target": self.target,
            "passed": self.passed,
            "failure_count": len(self.failures),
            "failures": self.failures,
            "data": self.data,
            "notes": self.notes,
        }


# -- rendering helpers --------------------------------------------------------


def _map_json(D: der.ConformalLinearMap) -> list[list[str]]:
    return [[str(p) for p in row] for row in D.entries]


def _vec_json(v: Vec, names) -> str:
    return render_terms(v, names)


def _jsonable(x: Any):
    if isinstance(x, Fraction):
        return str(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def emit_report(r: Report, fmt: str = "json") -> str:
    """Deterministic rendering of a report."""
    if fmt == "json":
        return json.dumps(r.as_dict(), sort_keys=True, indent=2, default=_jsonable) + "\n"
    if fmt != "text":
        raise UsageError(f"unknown format {fmt!r}")
    lines = [f"{r.command} {' '.join(r.target)}: {'PASS' if r.passed else 'FAIL'}"]
    for key in sorted(r.data):
        val = r.data[key]
        if isinstance(val, str) and "\n" in val:
            lines.append(f"{key}:")
            lines.extend("  " + ln for ln in val.rstrip("\n").split("\n"))
        elif isinstance(val, list):
            lines.append(f"{key}:")
            lines.extend(f"  {json.dumps(v, sort_keys=True, default=_jsonable)}" for v in val)
        else:
            lines.append(f"{key}: {val}")
    for f in r.failures:
        ctx = f" [{f['context']}]" if "context" in f else ""
        det = f" ({f['detail']})" if "detail" in f else ""
        lines.append(f"FAIL {f['tag']} at {tuple(f['witness'])}{det}{ctx}: {f['residual']}")
    for n in r.notes:
        lines.append(f"note: {n}")
    return "\n".join(lines) + "\n"


def exit_code(r: Report) -> int:
    return EXIT_PASS if r.passed else EXIT_FAIL


# -- argument helpers ---------------------------------------------------------


def _need(names: Sequence[str], count: int, cmd: str, what: str) -> None:
    if len(names) != count:
        raise UsageError(f"{cmd} expects {what}")


def _algebra(W: Workspace, name: str) -> ConformalAlgebra:
    try:
        return W.lookup(name, "algebra")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _algebra_or_module(W: Workspace, name: str) -> tuple[ConformalAlgebra, ConformalModule, list[str]]:
    try:
        kind, obj = W.lookup(name, "algebra", "module")
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if kind == "algebra":
        return obj, adjoint_module(obj), list(obj.names)
    return obj.parent, obj, list(obj.names)


def _clm(W: Workspace, name: str, A: ConformalAlgebra) -> der.ConformalLinearMap:
    try:
        D = W.lookup(name, "clm")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    if D.n != A.rank:
        raise UsageError(f"map {name!r} has rank {D.n}, algebra has rank {A.rank}")
    return D


def _endo(W: Workspace, name: str, A: ConformalAlgebra) -> EndoMatrix:
    D = _clm(W, name, A)
    if any(slot(0) in p.variables() for row in D.entries for p in row):
        raise UsageError(f"map {name!r} depends on l0; an endomorphism over Q[del] is needed")
    return EndoMatrix(D.entries)


def _int(args: dict, key: str, default: int | None = None) -> int:
    v = args.get(key)
    if v is None:
        if default is None:
            raise UsageError(f"--{key} is required")
        return default
    return int(v)


def _degree(args: dict) -> int:
    D = _int(args, "degree")
    if D < 0:
        raise UsageError("--degree must be nonnegative")
    return D


def _bidegree(args: dict) -> tuple[int, int]:
    k, l = _int(args, "k", 0), _int(args, "l", 0)
    if k < 0 or l < 0:
        raise UsageError("--k and --l must be nonnegative")
    return k, l


def _construction(r: Report, B: ConformalAlgebra, name: str) -> None:
    r.data["definition"] = render_algebra(name, B)
    r.data["rank"] = B.rank
    r.absorb(check_conformal_algebra(B), B.names)


# -- commands -------------------------------------------------------------------


def _cmd_check(W, names, args, r):
    _need(names, 1, "check", "one algebra name")
    A = _algebra(W, names[0])
    r.data["rank"] = A.rank
    r.absorb(check_conformal_algebra(A), A.names)


def _cmd_check_module(W, names, args, r):
    _need(names, 1, "check-module", "one module name")
    try:
        M = W.lookup(names[0], "module")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    r.data["rank"] = M.rank
    r.absorb(check_module(M), M.names)


def _cmd_check_bihom_lie(W, names, args, r):
    _need(names, 1, "check-bihom-lie", "one bihom name")
    try:
        L = W.lookup(names[0], "bihom")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    r.data["dim"] = L.dim
    r.absorb(check_bihom_lie(L), L.names)


def _cmd_twist(W, names, args, r):
    _need(names, 3, "twist", "an algebra and two map names")
    A = _algebra(W, names[0])
    B = cons.yau_twist(A, _endo(W, names[1], A), _endo(W, names[2], A))
    _construction(r, B, args.get("name") or f"{names[0]}_twisted")


def _cmd_affinize(W, names, args, r):
    _need(names, 1, "affinize", "one bihom name")
    try:
        L = W.lookup(names[0], "bihom")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    B = cons.affinize(L)
    _construction(r, B, args.get("name") or f"{names[0]}_affine")
    r.data["regular"] = B.is_regular


def _cmd_semidirect(W, names, args, r):
    _need(names, 2, "semidirect", "an algebra and a module name")
    A = _algebra(W, names[0])
    try:
        M = W.lookup(names[1], "module")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    B = cons.semidirect_product(A, M)
    _construction(r, B, args.get("name") or f"{names[0]}_{names[1]}")


def _cmd_extend(W, names, args, r):
    _need(names, 2, "extend-derivation", "an algebra and a map name")
    A = _algebra(W, names[0])
    B = cons.derivation_extension(A, _clm(W, names[1], A))
    _construction(r, B, args.get("name") or f"{names[0]}_ext")


def _cochain(W, name):
    try:
        return W.lookup(name, "cochain")[1]
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None


def _cmd_d(W, names, args, r):
    _need(names, 1, "d", "one cochain name")
    g = _cochain(W, names[0])
    s = args.get("s")
    dg = coh.differential(g) if s is None else coh.differential_s(g, int(s))
    r.data["arity"] = dg.arity
    r.data["result"] = render_cochain(f"d_{names[0]}", W.parents[("cochain", names[0])], dg)
    r.absorb(coh.validate_cochain(dg), g.module.names)


def _cmd_d2(W, names, args, r):
    _need(names, 1, "d2-check", "a cochain, algebra or module name")
    s = args.get("s")
    s = None if s is None else int(s)
    if names[0] in W.cochains:
        g = W.cochains[names[0]]
        r.absorb(coh.check_d_squared(g, s), g.module.names)
        r.data["cochains_checked"] = 1
        return
    A, M, out = _algebra_or_module(W, names[0])
    if s is not None and M.action != A.bracket:
        raise UsageError("--s needs adjoint coefficients")
    basis = coh.cochain_space_basis(A, M, _int(args, "arity"), _degree(args))
    for i, g in enumerate(basis):
        r.absorb(coh.check_d_squared(g, s), out, context=f"basis cochain {i}")
    r.data["cochains_checked"] = len(basis)


def _cochain_list(basis, over) -> list[str]:
    return [render_cochain(f"c{i}", over, g) for i, g in enumerate(basis)]


def _cmd_cochain_basis(W, names, args, r):
    _need(names, 1, "cochain-basis", "an algebra or module name")
    A, M, _ = _algebra_or_module(W, names[0])
    basis = coh.cochain_space_basis(A, M, _int(args, "arity"), _degree(args))
    r.data["dimension"] = len(basis)
    r.data["basis"] = _cochain_list(basis, names[0])


def _cmd_cohomology(W, names, args, r):
    _need(names, 1, "cohomology-report", "an algebra or module name")
    A, M, _ = _algebra_or_module(W, names[0])
    s = args.get("s")
    if s is not None and M.action != A.bracket:
        raise UsageError("--s needs adjoint coefficients")
    h = coh.truncated_cohomology_report(A, M, _int(args, "arity"), _degree(args), None if s is None else int(s))
    r.data.update(
        arity=h.arity,
        degree_bound=h.degree_bound,
        dim_cochains=h.dim_cochains,
        dim_cocycles=h.dim_cocycles,
        dim_coboundaries_inside=h.dim_coboundaries_inside,
        defect=h.defect,
    )


def _cmd_nijenhuis(W, names, args, r):
    _need(names, 2, "nijenhuis-check", "an algebra and a map name")
    A = _algebra(W, names[0])
    r.absorb(dfm.check_nijenhuis(A, _endo(W, names[1], A)), A.names)


def _psi_json(Df: dfm.FormalDeformation) -> list[dict]:
    A = Df.base
    return [
        {"left": A.names[i], "right": A.names[j], "value": render_terms(v, A.names)}
        for i, j, v in Df.psi._nonzero
    ]


def _cmd_deform(W, names, args, r):
    _need(names, 2, "deform", "an algebra and a map name")
    A = _algebra(W, names[0])
    f = _endo(W, names[1], A)
    nij = dfm.check_nijenhuis(A, f)
    r.absorb(nij, A.names)
    if not nij.passed:
        return
    Df = dfm.deformation_from_nijenhuis(A, f)
    r.data["psi"] = _psi_json(Df)
    r.absorb(dfm.check_deformation(Df), A.names)


def _cmd_triviality(W, names, args, r):
    _need(names, 2, "triviality-check", "an algebra and a map name")
    A = _algebra(W, names[0])
    f = _endo(W, names[1], A)
    nij = dfm.check_nijenhuis(A, f)
    r.absorb(nij, A.names)
    if not nij.passed:
        return
    Df = dfm.deformation_from_nijenhuis(A, f)
    r.absorb(dfm.check_triviality(Df, f), A.names)


def _cmd_derivations(W, names, args, r):
    _need(names, 1, "derivations", "one algebra name")
    A = _algebra(W, names[0])
    k, l = _bidegree(args)
    basis = der.solve_derivations(A, k, l, _degree(args))
    r.data["dimension"] = len(basis)
    r.data["basis"] = [_map_json(D) for D in basis]
    for i, D in enumerate(basis):
        r.absorb(der.is_derivation(A, D, k, l), A.names, context=f"basis map {i}")


def _cmd_inner(W, names, args, r):
    _need(names, 1, "inner", "one algebra name")
    A = _algebra(W, names[0])
    if not args.get("element"):
        raise UsageError("--element is required")
    try:
        a = parse_terms(args["element"], A.names)
    except ParseError as exc:
        raise UsageError(f"bad --element: {exc.message}") from None
    k, l = _bidegree(args)
    if l < 1:
        raise UsageError("inner derivations need --l >= 1")
    D = der.inner_derivation(A, a, k, l)
    r.data["map"] = _map_json(D)
    r.absorb(der.is_derivation(A, D, k, l), A.names)


def _witness_json(w: der.GenDerWitness) -> dict:
    return {"kind": w.kind, "k": w.k, "l": w.l, "maps": [_map_json(D) for D in w.maps]}


def _cmd_gder(W, names, args, r):
    _need(names, 1, "gder", "one algebra name")
    A = _algebra(W, names[0])
    kind = args.get("kind") or "gder"
    if kind not in der.KINDS:
        raise UsageError(f"--kind must be one of {', '.join(der.KINDS)}")
    k, l = _bidegree(args)
    ws = der.solve_generalized(A, kind, k, l, _degree(args))
    r.data["kind"] = kind
    r.data["dimension"] = len(ws)
    r.data["span_of_first_maps"] = len(der.span_basis([w.map for w in ws]))
    r.data["basis"] = [_witness_json(w) for w in ws]
    for i, w in enumerate(ws):
        r.absorb(der.check_generalized(A, w), A.names, context=f"witness {i}")


def _cmd_decompose(W, names, args, r):
    _need(names, 1, "decompose-gder", "one algebra name")
    A = _algebra(W, names[0])
    k, l = _bidegree(args)
    ws = der.solve_generalized(A, "gder", k, l, _degree(args))
    parts = []
    for i, w in enumerate(ws):
        try:
            q, c = der.decompose_gder(A, w)
        except der.DecompositionError as exc:
            r.absorb(exc.report, A.names, context=f"witness {i}")
            continue
        parts.append({"witness": i, "qder": _witness_json(q), "quasicentroid": _witness_json(c)})
    r.data["witnesses"] = len(ws)
    r.data["decompositions"] = parts


def _cmd_centroid_check(W, names, args, r):
    _need(names, 1, "centroid-check", "one algebra name")
    A = _algebra(W, names[0])
    k, l = _bidegree(args)
    D = _degree(args)
    cs = der.solve_generalized(A, "centroid", k, l, D)
    qs = der.solve_generalized(A, "quasicentroid", k, l, D)
    r.data["centroid_dimension"] = len(cs)
    r.data["quasicentroid_dimension"] = len(qs)
    for (i, c), (j, q) in product(enumerate(cs), enumerate(qs)):
        r.absorb(der.check_centroid_bracket_central(A, c, q, D), A.names, context=f"centroid {i}, quasicentroid {j}")
    r.absorb(der.quasicentroid_commutator_report(A, qs), A.names)
    r.notes = sorted(set(r.notes))


def _cmd_center(W, names, args, r):
    _need(names, 1, "center", "one algebra name")
    A = _algebra(W, names[0])
    Z = center(A, _degree(args))
    r.data["dimension"] = len(Z)
    r.data["basis"] = [_vec_json(v, A.names) for v in Z]


_DISPATCH = {
    "check": _cmd_check,
    "check-module": _cmd_check_module,
    "check-bihom-lie": _cmd_check_bihom_lie,
    "twist": _cmd_twist,
    "affinize": _cmd_affinize,
    "semidirect": _cmd_semidirect,
    "extend-derivation": _cmd_extend,
    "d": _cmd_d,
    "d2-check": _cmd_d2,
    "cochain-basis": _cmd_cochain_basis,
    "cohomology-report": _cmd_cohomology,
    "nijenhuis-check": _cmd_nijenhuis,
    "deform": _cmd_deform,
    "triviality-check": _cmd_triviality,
    "derivations": _cmd_derivations,
    "inner": _cmd_inner,
    "gder": _cmd_gder,
    "decompose-gder": _cmd_decompose,
    "centroid-check": _cmd_centroid_check,
    "center": _cmd_center,
}


def run_command(W: Workspace, cmd: str, names: Sequence[str], args: dict | None = None) -> Report:
    """Run one command on the workspace.

    Raises ``UsageError`` for bad arguments and lets precondition errors of
    the underlying operation (``ValueError`` subclasses) propagate.
    """
    if cmd not in _DISPATCH:
        raise UsageError(f"unknown command {cmd!r}")
    r = Report(cmd, list(names))
    _DISPATCH[cmd](W, list(names), dict(args or {}), r)
    return r


# -- main -----------------------------------------------------------------------


def load_workspace(paths: Sequence[str]) -> Workspace:
    """Parse the files as one text so references may cross files."""
    if not paths:
        from .examples import shipped_workspace

        return shipped_workspace()
    chunks, spans = [], []
    line = 0
    for p in paths:
        text = Path(p).read_text(encoding="utf-8")
        if not text.endswith("\n"):
            text += "\n"
        n = text.count("\n")
        spans.append((line, line + n, p))
        line += n
        chunks.append(text)
    try:
        return parse_definitions("".join(chunks))
    except ParseError as exc:
        for lo, hi, p in spans:
            if lo < exc.line <= hi:
                raise ParseError(exc.code, f"{p}: {exc.message}", exc.line - lo, exc.column) from None
        raise


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bihomlc", description="Checks and solvers for BiHom-Lie conformal algebras.")
    ap.add_argument("-f", "--file", action="append", default=[], help="definition file (repeatable)")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("names", nargs="*", help="object names the command acts on")
    ap.add_argument("--degree", type=int)
    ap.add_argument("--k", type=int)
    ap.add_argument("--l", type=int)
    ap.add_argument("--s", type=int)
    ap.add_argument("--arity", type=int)
    ap.add_argument("--kind", choices=der.KINDS)
    ap.add_argument("--element", help="algebra element, e.g. '(del) x + y'")
    ap.add_argument("--name", help="name for a constructed algebra")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        W = load_workspace(ns.file)
        args = {k: getattr(ns, k) for k in ("degree", "k", "l", "s", "arity", "kind", "element", "name")}
        r = run_command(W, ns.command, ns.names, args)
    except ParseError as exc:
        print(f"bihomlc: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"bihomlc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, cons.PreconditionError) as exc:
        print(f"bihomlc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # precondition failures of the underlying operations
        print(f"bihomlc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(emit_report(r, ns.format))
    return exit_code(r)


if __name__ == "__main__":
    sys.exit(main())
