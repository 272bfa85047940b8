#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Times the two hot kernels (dense revised simplex, cyclic Jacobi
eigendecomposition) on representative sizes, plus an end-to-end scenario
solve under each backend (the fallback is forced via CPSIGNAL_PURE=1 in a
subprocess so the import-time selection is exercised for real).
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from cpsignal._kernels import pure

try:
    from cpsignal._kernels import _core as compiled
except ImportError:
    compiled = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def random_lp(rng, m, n):
    A = rng.normal(size=(m, n))
    b = A @ rng.uniform(0.5, 1.5, size=n)
    c = rng.uniform(0.0, 1.0, size=n) + A.T @ rng.normal(size=m)
    return A, b, c


def bench_simplex(repeat):
    rng = np.random.default_rng(0)
    print("\ndense revised simplex (min time per solve)")
    print(f"{'size':>14} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for m, n in [(4, 12), (9, 60), (9, 500), (9, 4000), (20, 2000)]:
        A, b, c = random_lp(rng, m, n)
        args = (A, b, c, 10 * (m + n), 100_000)
        t_pure = timeit(lambda: pure.simplex_solve(*args), repeat)
        if compiled is None:
            print(f"{f'{m}x{n}':>14} {t_pure * 1e3:>10.3f}ms {'-':>12} {'-':>9}")
            continue
        t_comp = timeit(lambda: compiled.simplex_solve(*args), repeat)
        obj_p = pure.simplex_solve(*args)[3]
        obj_c = compiled.simplex_solve(*args)[3]
        assert abs(obj_p - obj_c) <= 1e-9 * (1 + abs(obj_p)), "backends disagree"
        print(f"{f'{m}x{n}':>14} {t_pure * 1e3:>10.3f}ms {t_comp * 1e3:>10.3f}ms "
              f"{t_pure / t_comp:>8.1f}x")


def bench_jacobi(repeat):
    rng = np.random.default_rng(1)
    print("\ncyclic Jacobi eigendecomposition (min time per call)")
    print(f"{'n':>14} {'pure':>12} {'compiled':>12} {'numpy.eigh':>12} {'speedup':>9}")
    for n in (4, 9, 16, 32, 64):
        Q = rng.normal(size=(n, n))
        Q = 0.5 * (Q + Q.T)
        t_pure = timeit(lambda: pure.jacobi_eig(Q), repeat)
        t_eigh = timeit(lambda: np.linalg.eigh(Q), repeat)
        if compiled is None:
            print(f"{n:>14} {t_pure * 1e3:>10.3f}ms {'-':>12} {t_eigh * 1e3:>10.3f}ms {'-':>9}")
            continue
        t_comp = timeit(lambda: compiled.jacobi_eig(Q), repeat)
        print(f"{n:>14} {t_pure * 1e3:>10.3f}ms {t_comp * 1e3:>10.3f}ms "
              f"{t_eigh * 1e3:>10.3f}ms {t_pure / t_comp:>8.1f}x")


def bench_end_to_end():
    print("\nend-to-end: scenario 3 solve (polyhedral tol 1e-2 + splitting tol 1e-7)",
          flush=True)
    script = (
        "import time, cpsignal as cs, cpsignal._kernels as k; "
        "from pathlib import Path; "
        "p = cs.load_problem(Path(cs.__file__).parent / 'data' / 'scenario3.json'); "
        "t0 = time.perf_counter(); s = cs.solve(p, tol=1e-2, max_iters=500); "
        "d = cs.solve_dnn(p, tol=1e-7); "
        "print(f'  backend={k.BACKEND}: {time.perf_counter() - t0:.2f}s "
        "(poly {s.value:.4f}, dnn {d.value:.4f})')"
    )
    for env_extra in ({}, {"CPSIGNAL_PURE": "1"}):
        env = dict(os.environ, **env_extra)
        subprocess.run([sys.executable, "-c", script], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    print(f"compiled extension available: {compiled is not None}")
    bench_simplex(args.repeat)
    bench_jacobi(args.repeat)
    bench_end_to_end()


if __name__ == "__main__":
    sys.path.insert(0, str(Path(__file__).parent.parent / "src"))
    main()
