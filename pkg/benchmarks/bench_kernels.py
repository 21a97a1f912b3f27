"""Compiled kernels versus the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--quick]

Each row times one kernel on identical inputs under both backends and checks
that the results agree.  The last row runs a small mixture Monte-Carlo end to
end in a subprocess per backend (DBCS_PURE_PYTHON=1 selects the fallback).
"""

import argparse
import math
import os
import subprocess
import sys
import time

import numpy as np

from dbcs import _pykernels as py

try:
    from dbcs import _ckernels as cy
except ImportError:
    sys.exit("compiled kernels are not built; run `python3 setup.py build_ext --inplace`")


def best_of(fn, repeat):
    best = math.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(scale):
    rng = np.random.default_rng(0)
    n = int(20_000 * scale)
    b = 10 ** rng.uniform(0.1, 4, n)
    z = b * rng.uniform(-2, 3, n)
    xs = -np.exp(rng.uniform(-300, -1, n))
    path = rng.uniform(-2, 2, int(2000 * scale)) - 0.1
    s_var = np.cumsum(path**2)
    total = np.cumsum(path)
    counts = np.arange(1.0, path.size + 1)
    big = rng.normal(size=int(1_000_000 * scale))

    def kummer(k):
        return lambda: [k.log_kummer_1f1_1(float(bi), float(zi)) for bi, zi in zip(b, z)]

    def lambert(k):
        return lambda: [k.lambert_wm1(float(x)) for x in xs]

    def half_widths(k):
        return lambda: k.mixture_half_widths(s_var, counts, 2.0, 1.0, 0.05)

    def first_miss(k):
        truth = np.full(path.size, -0.1)
        return lambda: k.mixture_first_miss(total, s_var, counts, truth, 2.0, 1.0, 0.05)

    def cumsum(k):
        return lambda: k.compensated_cumsum(big)

    return [
        (f"log 1F1(1; b; z) x {n}", kummer),
        (f"lambert W-1 x {n}", lambert),
        (f"mixture half-widths, {path.size} steps", half_widths),
        (f"mixture first miss, {path.size} steps", first_miss),
        (f"double-double cumsum, {big.size} terms", cumsum),
    ]


def agree(a, b):
    if np.isscalar(a):
        return a == b
    return bool(np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-10, atol=0))


def end_to_end(reps):
    code = f"from dbcs.evalsuite import scenario_mixture; scenario_mixture(reps={reps}, horizon=2000)"
    out = {}
    for name, env in (("cython", {}), ("python", {"DBCS_PURE_PYTHON": "1"})):
        t0 = time.perf_counter()
        subprocess.run([sys.executable, "-c", code], check=True, env={**os.environ, **env})
        out[name] = time.perf_counter() - t0
    return out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="smaller inputs, one repeat")
    args = ap.parse_args()
    scale = 0.1 if args.quick else 1.0
    repeat = 1 if args.quick else 3
    print(f"{'kernel':<42}{'cython s':>12}{'python s':>12}{'speedup':>10}  agree")
    for label, make in cases(scale):
        tc, rc = best_of(make(cy), repeat)
        tp, rp = best_of(make(py), repeat)
        print(f"{label:<42}{tc:>12.4f}{tp:>12.4f}{tp / tc:>9.1f}x  {agree(rc, rp)}")
    reps = 10 if args.quick else 50
    e2e = end_to_end(reps)
    label = f"mixture MC end to end, {reps} x 2000 steps"
    print(f"{label:<42}{e2e['cython']:>12.4f}{e2e['python']:>12.4f}{e2e['python'] / e2e['cython']:>9.1f}x  -")


if __name__ == "__main__":
    main()
