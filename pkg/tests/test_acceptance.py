"""Acceptance criteria 1-9.

Each criterion is evaluated by a ``criterion_N`` function returning a
``Verdict`` made of named parts; the test prints one PASS/FAIL line per
criterion (and per part) and then asserts every part.  Run directly with
``python tests/test_acceptance.py`` for the summary without pytest.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from itertools import product

import pytest

from bihomlc.cli import main as cli_main
from bihomlc.cohomology import check_d_squared, cochain_space_basis, differential_s
from bihomlc.constructions import affinize, derivation_extension, semidirect_product, yau_twist
from bihomlc.core import adjoint_module, center, check_conformal_algebra
from bihomlc.deformation import check_deformation, check_nijenhuis, check_triviality, deformation_from_nijenhuis
from bihomlc.deformation import find_nijenhuis
from bihomlc.derivations import (
    ConformalLinearMap,
    check_centroid_bracket_central,
    check_der_bihom_structure,
    check_generalized,
    clm_commutator,
    clm_in_span,
    commutator_derivation_report,
    decompose_gder,
    DecompositionError,
    is_derivation,
    quasicentroid_commutator_report,
    solve_derivations,
    solve_generalized,
)
from bihomlc.examples import (
    TWIST_A,
    TWIST_B,
    abelian1,
    broken_skew,
    current_algebra,
    derived_bihom2,
    twisted2,
    twisted2_perturbed,
)
from bihomlc.linalg import EndoMatrix
from bihomlc.poly import DEL, Poly, slot
from bihomlc.textformat import parse_definitions, render


@dataclass
class Verdict:
    number: int
    title: str
    budget: float
    parts: dict = field(default_factory=dict)
    elapsed: float = 0.0

    def part(self, name: str, ok: bool, detail: str = "") -> None:
        self.parts[name] = (bool(ok), detail)

    @property
    def passed(self) -> bool:
        return all(ok for ok, _ in self.parts.values()) and self.elapsed < self.budget

    def lines(self) -> list[str]:
        head = "PASS" if self.passed else "FAIL"
        out = [f"[criterion {self.number}] {head}: {self.title} ({self.elapsed:.2f} s, budget {self.budget:g} s)"]
        for name, (ok, detail) in self.parts.items():
            out.append(f"    {'ok  ' if ok else 'FAIL'} {name}" + (f": {detail}" if detail else ""))
        return out


def timed(fn):
    def wrapper():
        t0 = time.perf_counter()
        v = fn()
        v.elapsed = time.perf_counter() - t0
        return v

    wrapper.__name__ = fn.__name__
    return wrapper


# -- criteria ------------------------------------------------------------------


@timed
def criterion_1() -> Verdict:
    v = Verdict(1, "axiom suite on the shipped examples; broken-skew fails at skew only", 1.0)
    tw = yau_twist(current_algebra(), TWIST_A, TWIST_B)
    algebras = {
        "abelian1": abelian1(),
        "current2": current_algebra(),
        "twisted2 (yau_twist)": tw,
        "affinized derived2": affinize(derived_bihom2()),
    }
    for name, A in algebras.items():
        rep = check_conformal_algebra(A)
        v.part(f"{name} passes", rep.passed, f"{len(rep.failures)} failures")
    v.part("yau_twist output equals shipped twisted2", tw.same_data(twisted2()))
    rep = check_conformal_algebra(broken_skew())
    v.part("broken_skew fails exactly at skew", rep.tags() == {"skew"}, f"tags {sorted(rep.tags())}")
    return v


@timed
def criterion_2() -> Verdict:
    v = Verdict(2, "semidirect product with the adjoint module passes all axioms", 5.0)
    A = twisted2()
    S = semidirect_product(A, adjoint_module(A))
    rep = check_conformal_algebra(S)
    v.part("rank 4", S.rank == 4)
    v.part("axiom suite", rep.passed, f"{len(rep.failures)} failures")
    return v


@timed
def criterion_3() -> Verdict:
    v = Verdict(3, "d^2 = 0 and d gamma is a cochain on arity 0, 1 basis cochains (D <= 2)", 60.0)
    A = twisted2()
    M = adjoint_module(A)
    basis = cochain_space_basis(A, M, 0, 2) + cochain_space_basis(A, M, 1, 2)
    sq_bad, valid_bad, m1_bad = [], [], []
    for i, g in enumerate(basis):
        rep = check_d_squared(g)
        if "d-squared" in rep.tags():
            sq_bad.append(i)
        if any(t.startswith("dgamma-") for t in rep.tags()):
            valid_bad.append(i)
        dg = differential_s(g, -1, check=False)
        if not differential_s(dg, -1, check=False).is_zero():
            m1_bad.append(i)
    n = len(basis)
    v.part("d(d gamma) = 0", not sq_bad, f"{n - len(sq_bad)}/{n} basis cochains")
    v.part("validate_cochain(d gamma) passes", not valid_bad, f"{n - len(valid_bad)}/{n} basis cochains")
    v.part("d_-1(d_-1 gamma) = 0", not m1_bad, f"{n - len(m1_bad)}/{n} basis cochains")
    P = twisted2_perturbed()
    PM = adjoint_module(P)
    broken = any("d-squared" in check_d_squared(g).tags() for g in cochain_space_basis(P, PM, 1, 2))
    v.part("perturbed Jacobi gives some d^2 gamma != 0", broken)
    return v


@timed
def criterion_4() -> Verdict:
    v = Verdict(4, "Nijenhuis operators give trivial deformations (t^0, t^1, t^2 matched)", 5.0)
    A = twisted2()
    found = find_nijenhuis(A, 1)
    v.part("search finds a non-scalar Nijenhuis operator", bool(found), f"{len(found)} found")
    d = Poly.var(DEL)
    candidates = {
        "0": EndoMatrix.identity(2).scale(0),
        "id": EndoMatrix.identity(2),
        "(3/2) id": EndoMatrix.identity(2).scale(Fraction(3, 2)),
    }
    nij = EndoMatrix.diag([d, 0])
    if found:
        candidates["diag(del, 0)" if nij in found else "searched"] = nij if nij in found else found[0]
    for name, f in candidates.items():
        ok = check_nijenhuis(A, f).passed
        if ok:
            Df = deformation_from_nijenhuis(A, f)
            ok = check_deformation(Df).passed and check_triviality(Df, f).passed
        v.part(f"f = {name}", ok)
    searched = all(
        check_deformation(Df).passed and check_triviality(Df, f).passed
        for f in found
        for Df in [deformation_from_nijenhuis(A, f)]
    )
    v.part("every searched operator", searched, f"{len(found)} operators")
    return v


def _monomial_count(D: int) -> int:
    # independent oracle: enumerate del^a l^b with a + b <= D
    return sum(1 for a in range(D + 1) for b in range(D + 1) if a + b <= D)


@timed
def criterion_5() -> Verdict:
    v = Verdict(5, "derivation solver dimensions on the abelian line", 5.0)
    A = abelian1()
    for D in (0, 1, 2):
        basis = solve_derivations(A, 0, 0, D)
        want = (D + 1) * (D + 2) // 2
        v.part(f"D = {D}", len(basis) == want == _monomial_count(D), f"dim {len(basis)}, expected {want}")
        v.part(f"D = {D} outputs are derivations", all(is_derivation(A, m, 0, 0).passed for m in basis))
    return v


@timed
def criterion_6() -> Verdict:
    v = Verdict(6, "commutators of derivations; BiHom-Jacobi suite on solved bases", 60.0)
    A = twisted2()
    bidegrees = ((0, 0), (0, 1), (1, 0))
    bases = {kl: solve_derivations(A, *kl, 1) for kl in bidegrees}
    bad = []
    total = 0
    for (k, l), (s, t) in product(bidegrees, repeat=2):
        for (i, D), (j, E) in product(enumerate(bases[(k, l)]), enumerate(bases[(s, t)])):
            total += 1
            if not commutator_derivation_report(A, D, k, l, E, s, t).passed:
                bad.append(((k, l), i, (s, t), j))
    v.part("commutator families are derivations at summed bidegree", not bad, f"{total - len(bad)}/{total} pairs")
    sample = [D for kl in bidegrees for D in bases[kl]]
    rep = check_der_bihom_structure(A, sample)
    counts = {t: len(rep.witnesses(t)) for t in ("commute", "skew", "jacobi")}
    v.part("twists commute on the sample", counts["commute"] == 0)
    v.part("commutator skew-symmetry", counts["skew"] == 0, f"{counts['skew']} failures")
    v.part("commutator BiHom-Jacobi", counts["jacobi"] == 0, f"{counts['jacobi']} failures")
    return v


@timed
def criterion_7() -> Verdict:
    v = Verdict(7, "derivation extension passes iff the map is a derivation", 5.0)
    A = twisted2()
    basis = solve_derivations(A, 0, 1, 1)
    D = ConformalLinearMap([[0, 0], [0, Poly.var(slot(0))]])
    v.part("chosen map is a solved (0, 1)-derivation", D in basis)
    rep = check_conformal_algebra(derivation_extension(A, D))
    v.part("extension by the derivation passes", rep.passed, f"{len(rep.failures)} failures")
    bad = D + ConformalLinearMap([[1, 0], [0, 0]])
    v.part("perturbed map is not a derivation", not is_derivation(A, bad, 0, 1).passed and not clm_in_span(basis, bad))
    rep = check_conformal_algebra(derivation_extension(A, bad))
    d_index = A.rank
    wits = [f.witness for f in rep.failures]
    v.part(
        "extension by the perturbed map fails with d in the witness",
        (not rep.passed) and all(d_index in w for w in wits),
        f"tags {sorted(rep.tags())}, first witness {wits[0] if wits else None}",
    )
    return v


@timed
def criterion_8() -> Verdict:
    v = Verdict(8, "generalized derivations: inclusion chain, decomposition, centroid commutators", 120.0)
    A = twisted2()
    bidegrees = ((0, 0), (0, 1), (1, 0))
    D = 1

    def firsts(kind, kl):
        return [w.map for w in solve_generalized(A, kind, *kl, D)]

    chain_ok = True
    for kl in bidegrees:
        z, c, qc = firsts("central", kl), firsts("centroid", kl), firsts("quasicentroid", kl)
        q, g = firsts("qder", kl), firsts("gder", kl)
        der = solve_derivations(A, *kl, D)
        for small, big in ((z, der), (der, q), (q, g), (c, qc), (qc, g)):
            chain_ok &= all(clm_in_span(big, m) for m in small)
    v.part("inclusion chain holds span-wise", chain_ok)
    failures = 0
    count = 0
    for kl in bidegrees:
        for w in solve_generalized(A, "gder", *kl, D):
            count += 1
            try:
                decompose_gder(A, w)
            except DecompositionError:
                failures += 1
    v.part("every GDer witness decomposes", failures == 0, f"{count - failures}/{count}")
    v.part("center(A, 3) is empty", center(A, 3) == [])
    cs = solve_generalized(A, "centroid", 0, 0, D)
    qs = solve_generalized(A, "quasicentroid", 0, 0, D)
    zero = all(clm_commutator(c.map, q.map).is_zero() for c, q in product(cs, qs))
    central = all(check_centroid_bracket_central(A, c, q, 3).passed for c, q in product(cs, qs))
    v.part("centroid-quasicentroid commutators vanish", zero and central, f"{len(cs)} x {len(qs)} pairs")
    rep = quasicentroid_commutator_report(A, qs)
    v.part("quasicentroid commutator property", rep.passed, "; ".join(rep.notes))
    v.part("all witnesses pass their predicates", all(check_generalized(A, w).passed for w in cs + qs))
    return v


def _cli(argv):
    from contextlib import redirect_stderr, redirect_stdout
    from io import StringIO

    out, err = StringIO(), StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        try:
            code = cli_main(argv)
        except SystemExit as exc:
            code = exc.code
    return code, out.getvalue()


@timed
def criterion_9() -> Verdict:
    v = Verdict(9, "CLI contract: round trip, exit codes, deterministic JSON", 30.0)
    files = [f for f in resources.files("bihomlc").joinpath("data").iterdir() if f.name.endswith(".bhl")]
    ok = bool(files)
    for f in files:
        W = parse_definitions(f.read_text(encoding="utf-8"))
        text = render(W)
        ok &= parse_definitions(text).same_as(W) and render(parse_definitions(text)) == text
    v.part("parse(render(W)) = W on shipped files", ok, f"{len(files)} file(s)")
    cases = [
        (["check", "abelian1"], 0),
        (["derivations", "abelian1", "--k", "0", "--l", "0", "--degree", "2"], 0),
        (["check", "broken_skew"], 1),
        (["extend-derivation", "twisted2", "der01_bad"], 1),
        (["check", "missing"], 2),
        (["no-such-command"], 2),
        (["derivations", "abelian1"], 2),
    ]
    got = [(argv, want, _cli(argv)[0]) for argv, want in cases]
    bad = [(" ".join(a), w, g) for a, w, g in got if w != g]
    v.part("exit codes 0 / 1 / 2", not bad, f"mismatches {bad}" if bad else f"{len(cases)} cases")
    _, out = _cli(["derivations", "abelian1", "--k", "0", "--l", "0", "--degree", "2"])
    v.part("dimension 6 reported", json.loads(out)["data"]["dimension"] == 6)
    cmds = [
        ["gder", "twisted2", "--kind", "qder", "--degree", "1"],
        ["check", "broken_skew"],
        ["cochain-basis", "twisted2", "--arity", "1", "--degree", "1"],
    ]
    same = True
    for argv in cmds:
        runs = [subprocess.run([sys.executable, "-m", "bihomlc.cli", *argv], capture_output=True).stdout for _ in range(2)]
        same &= runs[0] == runs[1] and bool(runs[0])
    v.part("byte-identical JSON across runs", same, f"{len(cmds)} commands")
    return v


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9]


@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion, capsys):
    v = criterion()
    with capsys.disabled():
        print()
        print("\n".join(v.lines()))
    failed = [name for name, (ok, _) in v.parts.items() if not ok]
    assert not failed, f"criterion {v.number} failing parts: {failed}"
    assert v.elapsed < v.budget, f"criterion {v.number} took {v.elapsed:.2f} s"


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    for v in results:
        print("\n".join(v.lines()))
    sys.exit(0 if all(v.passed for v in results) else 1)
