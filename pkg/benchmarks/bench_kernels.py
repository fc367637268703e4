"""Compare the numba and numpy kernel backends.

Kernel timings call both implementations directly from ``kernels.IMPLEMENTATIONS``
in one process.  End-to-end timings run a witness certification in fresh
subprocesses, with and without ``GSCHUR_DISABLE_JIT``.

    python benchmarks/bench_kernels.py [--repeat 5] [--json results.json]
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from gschur import kernels
from gschur._jit import HAS_NUMBA
from gschur.algebra import cyclic_group_algebra, matrix_algebra, truncated_free_algebra

CASES = {
    "cyclic8": lambda: cyclic_group_algebra(8),
    "matrix3": lambda: matrix_algebra(3),
    "free23": lambda: truncated_free_algebra(2, 3)[0],
    "free24": lambda: truncated_free_algebra(2, 4)[0],
}

END_TO_END = """
import time
from gschur.series import NcPowerSeries
from gschur.schoenberg import build_witness
f = NcPowerSeries(2, {(1,): 1.0, (1, 2): -0.3, (2, 2, 1, 1): 0.1})
build_witness(f, (1, 2), 1.0)  # warm-up (compilation or cache load)
t = time.perf_counter()
build_witness(f, (1, 2), 1.0)
print(time.perf_counter() - t)
"""


def kernel_args(alg, rng):
    n = alg.dim
    a = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    T = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    S = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    idx, vals = alg.coo_index, alg.coo_values
    scratch = np.zeros((n * n, n * n), dtype=np.complex128)
    mark = np.zeros((n * n, n * n), dtype=np.bool_)
    return {
        "algebra_multiply": (idx, vals, a, a, n),
        "algebra_left_regular": (idx, vals, a, n),
        "tensor_multiply": (idx, vals, idx, vals, T, S),
        "tensor_left_regular": (idx, vals, idx, vals, T),
        "tensor_holder_bound": (idx, vals, idx, vals, T, scratch, mark),
    }


def best_of(fn, args, repeat):
    fn(*args)  # compile / warm caches
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def run_end_to_end():
    out = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = {**os.environ, "GSCHUR_DISABLE_JIT": flag}
        res = subprocess.run([sys.executable, "-c", END_TO_END], capture_output=True, text=True, env=env)
        out[label] = float(res.stdout.strip()) if res.returncode == 0 else None
    return out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", help="also write results here")
    p.add_argument("--skip-end-to-end", action="store_true")
    args = p.parse_args(argv)
    if not HAS_NUMBA:
        print("numba is not installed; only the numpy backend can run")
        return 1
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'case':10} {'kernel':22} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8}")
    for case, build in CASES.items():
        alg = build()
        for name, kargs in kernel_args(alg, rng).items():
            if name.startswith("tensor") and alg.dim > 16 and name != "tensor_multiply":
                continue  # dense numpy left-regular blocks get too large
            t_np = best_of(kernels.IMPLEMENTATIONS["numpy"][name], kargs, args.repeat)
            t_nb = best_of(kernels.IMPLEMENTATIONS["numba"][name], kargs, args.repeat)
            rows.append({"case": case, "dim": alg.dim, "kernel": name, "numpy": t_np, "numba": t_nb})
            print(f"{case:10} {name:22} {t_np:11.3e} {t_nb:11.3e} {t_np / t_nb:8.1f}x")
    results = {"kernels": rows}
    if not args.skip_end_to_end:
        e2e = run_end_to_end()
        results["witness_d2_D4"] = e2e
        print(f"\nwitness build d=2 D=4 (warm): numba {e2e['numba']:.3f}s, numpy {e2e['numpy']:.3f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=1, sort_keys=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
