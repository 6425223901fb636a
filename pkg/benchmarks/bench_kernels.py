"""Benchmark the numba kernels against the pure-NumPy fallbacks.

Times the exhaustive root-table workload (every characteristic
polynomial for 2 <= n <= 15) through both kernel families: Horner
evaluation, bracketed bisection, and Durand-Kerner sweeps.  The jitted
path gets one unmeasured warmup run so compilation never lands in a
timing.  If numba is not installed only the NumPy path is reported.

Run:

    python benchmarks/bench_kernels.py
"""

import statistics
import time

import numpy as np

from itereq import _kernels
from itereq.charpoly import CharProblem, build_char_poly

REPEATS = 7


def table_polys():
    polys = []
    for n in range(2, 16):
        for k in range(0, n + 1):
            polys.append(build_char_poly(CharProblem(n, k)).as_array())
    return polys


def workload(polys, horner, bisect_loop, dk_sweeps):
    total = 0.0
    for arr in polys:
        deg = len(arr) - 1
        # dense evaluation sweep
        for x in np.linspace(-2.0, 2.0, 201):
            total += horner(arr, float(x))
        # bracketed bisection between -1 and 0.999 when signs differ
        flo = horner(arr, -0.999)
        fhi = horner(arr, 0.999)
        if flo * fhi < 0:
            mid, _, _, _ = bisect_loop(arr, -0.999, 0.999, flo, 1e-12)
            total += mid
        # full spectrum
        z0 = (1.0 + np.max(np.abs(arr[:-1] / arr[-1]))) * np.exp(
            1j * (2.0 * np.pi * (np.arange(deg) + 0.25) / deg + 0.5 / deg)
        )
        z, best, _ = dk_sweeps(arr, z0, 1e-13 * np.max(np.abs(arr)), 1e-15)
        total += float(np.sum(np.abs(z)))
    return total


def time_path(name, polys, fns, repeats=REPEATS):
    durations = []
    checksum = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        checksum = workload(polys, *fns)
        durations.append(time.perf_counter() - t0)
    return {
        "name": name,
        "mean": statistics.mean(durations),
        "std": statistics.pstdev(durations),
        "best": min(durations),
        "checksum": checksum,
    }


def main():
    polys = table_polys()
    results = []

    numpy_fns = (
        _kernels.horner_py, _kernels.bisect_loop_py, _kernels.dk_sweeps_py,
    )
    results.append(time_path("numpy", polys, numpy_fns))

    if _kernels.NUMBA_AVAILABLE:
        jit_fns = (
            _kernels.horner_jit, _kernels.bisect_loop_jit, _kernels.dk_sweeps_jit,
        )
        print("[warmup] one unmeasured jitted pass (compilation)")
        workload(polys[:4], *jit_fns)
        results.append(time_path("numba", polys, jit_fns))
    else:
        print("[info] numba not installed; timing the NumPy path only")

    header = f"{'path':8s} {'mean(s)':>10s} {'std(s)':>9s} {'best(s)':>10s}"
    print(header)
    print("-" * len(header))
    for r in results:
        print(f"{r['name']:8s} {r['mean']:10.4f} {r['std']:9.4f} {r['best']:10.4f}")

    if len(results) == 2:
        a, b = results
        if abs(a["checksum"] - b["checksum"]) > 1e-6 * (1 + abs(a["checksum"])):
            print("[warn] checksums differ between paths; investigate")
        print(f"\nspeedup (numpy / numba): {a['mean'] / b['mean']:.2f}x")


if __name__ == "__main__":
    main()
