"""Compare the compiled and pure-Python elimination kernels.

    python benchmarks/bench_echelon.py [--repeat N] [--algebras A2,B3,C3]

Cases: ``solve_affine`` and ``rank`` on assembled connection systems, and
``rank`` on seeded random sparse integer matrices.  Both kernels must return
identical results.  A compiled run that overflows int64 falls back to the
Python kernel, so its time includes the wasted attempt.
"""

import argparse
import random
import time
from fractions import Fraction

from orbitconn import exact_linalg as xl
from orbitconn.connection import I, IIP, assemble
from orbitconn.lie_core import build_algebra
from orbitconn.orbits import orbit_catalog


def best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def random_matrix(m, n, density, seed):
    rng = random.Random(seed)
    rows = [{j: Fraction(rng.choice((-2, -1, 1, 2))) for j in range(n) if rng.random() < density} for _ in range(m)]
    return xl.MatrixQ(m, n, [{j: v for j, v in r.items() if v} for r in rows])


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--algebras", default="A2,B3,C3")
    args = ap.parse_args()
    backends = xl.available_backends()
    if "compiled" not in backends:
        print("compiled kernel not built; only the python kernel is available")

    cases = []
    for name in args.algebras.split(","):
        L = build_algebra(name[0], int(name[1:]))
        for ctx in orbit_catalog(L):
            s = assemble(ctx, {I, IIP})
            tag = f"{name} {ctx.label} {s.matrix.nrows}x{s.matrix.ncols}"
            cases.append((f"{tag} solve", lambda s=s: xl.solve_affine(s.matrix, s.rhs)))
            # rank runs the elimination to the end instead of stopping at the
            # first inconsistent row
            cases.append((f"{tag} rank", lambda s=s: xl.rank(s.matrix)))
    for m, n, d in [(400, 400, 0.01), (2000, 1500, 0.002)]:
        A = random_matrix(m, n, d, seed=m)
        cases.append((f"random rank {m}x{n}", lambda A=A: xl.rank(A)))

    print(f"{'case':40s}" + "".join(f"{b:>12s}" for b in backends) + "   speedup")
    for label, fn in cases:
        times, results = [], []
        for b in backends:
            with xl.use_backend(b):
                t, r = best_of(fn, args.repeat)
            times.append(t)
            results.append(r)
        if any(r != results[0] for r in results):
            raise SystemExit(f"kernels disagree on {label}")
        speed = f"{times[-1] / times[0]:8.1f}x" if len(times) > 1 else ""
        print(f"{label:40s}" + "".join(f"{t:11.3f}s" for t in times) + "  " + speed)


if __name__ == "__main__":
    main()
