"""Compare the compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]

Micro benchmarks call both kernel modules directly on identical inputs
and check the outputs agree.  The end-to-end rows run a solver in a
subprocess per backend (selected with BIHOMLC_PURE_PYTHON).
"""

from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time
from fractions import Fraction

from bihomlc import _kernels_py as pyk

try:
    from bihomlc import _ckernels as ck
except ImportError:
    ck = None

END_TO_END = {
    "solve_derivations(twisted2, 0, 1, D=2)": (
        "from bihomlc.examples import twisted2; from bihomlc.derivations import solve_derivations; "
        "solve_derivations(twisted2(), 0, 1, 2)"
    ),
    "d2 suite (arity 1, D=2)": (
        "from bihomlc.examples import twisted2; from bihomlc.core import adjoint_module; "
        "from bihomlc import cohomology as c; A = twisted2(); M = adjoint_module(A); "
        "[c.check_d_squared(g) for g in c.cochain_space_basis(A, M, 1, 2)]"
    ),
}


def random_terms(rng: random.Random, n: int, nvars: int = 3, maxdeg: int = 4) -> dict:
    out = {}
    for _ in range(n):
        key = 0
        for v in range(nvars):
            key |= rng.randint(0, maxdeg) << (16 * v)
        out[key] = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 5))
    return out


def random_system(rng: random.Random, nrows: int, ncols: int, density: float) -> list[dict]:
    rows = []
    for _ in range(nrows):
        row = {j: Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for j in range(ncols) if rng.random() < density}
        rows.append({j: v for j, v in row.items() if v})
    return rows


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def micro(repeat: int) -> list[tuple[str, float, float | None]]:
    rng = random.Random(7)
    polys = [(random_terms(rng, 40), random_terms(rng, 40)) for _ in range(50)]
    systems = [random_system(rng, 60, 80, 0.15) for _ in range(5)]

    def mul(mod):
        return lambda: [mod.mul_terms(a, b) for a, b in polys]

    def add(mod):
        return lambda: [mod.add_terms(a, b, -3) for a, b in polys for _ in range(20)]

    def null(mod):
        return lambda: [mod.nullspace(s, 80) for s in systems]

    rows = []
    for label, make in (("mul_terms x50", mul), ("add_terms x1000", add), ("nullspace 60x80 x5", null)):
        ref = make(pyk)()
        if ck is not None and make(ck)() != ref:
            raise SystemExit(f"backend mismatch in {label}")
        t_py = best_of(make(pyk), repeat)
        t_c = best_of(make(ck), repeat) if ck is not None else None
        rows.append((label, t_py, t_c))
    return rows


def end_to_end(repeat: int) -> list[tuple[str, float, float | None]]:
    rows = []
    for label, code in END_TO_END.items():
        res = {}
        for backend, flag in (("python", "1"), ("cython", "0")):
            env = dict(os.environ, BIHOMLC_PURE_PYTHON=flag)
            stmt = f"import time; t=time.perf_counter(); {code}; print(time.perf_counter()-t)"
            best = None
            for _ in range(repeat):
                out = subprocess.run([sys.executable, "-c", stmt], env=env, capture_output=True, text=True, check=True)
                t = float(out.stdout.strip().splitlines()[-1])
                best = t if best is None else min(best, t)
            res[backend] = best
        rows.append((label, res["python"], res["cython"] if ck is not None else None))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()
    rows = micro(args.repeat)
    if not args.skip_end_to_end:
        rows += end_to_end(max(1, args.repeat // 2))
    print(f"{'benchmark':45s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for label, tp, tc in rows:
        if tc is None:
            print(f"{label:45s} {tp:10.4f} {'n/a':>10s} {'':>8s}")
        else:
            print(f"{label:45s} {tp:10.4f} {tc:10.4f} {tp / tc:7.2f}x")


if __name__ == "__main__":
    main()
