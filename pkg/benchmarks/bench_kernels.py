"""Time the hot kernels on both backends: numba @njit vs pure numpy.

Usage::

    python benchmarks/bench_kernels.py [--scans 200] [--allocs 2000] [--step 1e-5]

The numba timings exclude compilation (one warm-up call per kernel).  If
numba is unavailable, or MARGINDISC_NUMBA=0 is set, only the numpy path runs.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from margindisc import _kernels
from margindisc.machine import jordan_spectrum


def time_scans(fn, pairs, step):
    start = time.perf_counter()
    acc = 0.0
    for theta, r in pairs:
        acc += fn(theta, r, False, step)[1]
        acc += fn(theta, r, True, step)[1]
    return time.perf_counter() - start, acc


def time_allocs(fn, spectrum, margins):
    start = time.perf_counter()
    acc = 0.0
    for R in margins:
        acc += float(fn(spectrum.c, spectrum.p, spectrum.r_crit, R).sum())
    return time.perf_counter() - start, acc


def main() -> None:
    parser = argparse.ArgumentParser(description="Benchmark scan and allocation kernels")
    parser.add_argument("--scans", type=int, default=200, help="random (c, r) pairs")
    parser.add_argument("--allocs", type=int, default=2000, help="allocation solves")
    parser.add_argument("--step", type=float, default=1e-5, help="scan grid step (rad)")
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    pairs = []
    for _ in range(args.scans):
        c = float(rng.uniform(0.05, 0.95))
        rc = 0.5 * (1.0 - math.sqrt(1.0 - c * c))
        pairs.append((math.acos(c), float(rng.uniform(0.0, 1.0)) * rc))

    spectrum = jordan_spectrum(9, 2)
    cap = float(spectrum.p[:-1] @ spectrum.r_crit[:-1])
    margins = rng.uniform(1e-6, 0.99 * cap, size=args.allocs)

    backends = [("numpy", _kernels.scan_povm_numpy, _kernels.kkt_margins_numpy)]
    if _kernels.USE_NUMBA:
        # warm-up triggers compilation before timing
        _kernels.scan_povm_jit(pairs[0][0], pairs[0][1], False, 1e-3)
        _kernels.kkt_margins_jit(spectrum.c, spectrum.p, spectrum.r_crit, 0.01)
        backends.append(("numba", _kernels.scan_povm_jit, _kernels.kkt_margins_jit))
    else:
        print("numba backend inactive (not installed or MARGINDISC_NUMBA=0)")

    results = {}
    for name, scan_fn, kkt_fn in backends:
        scan_t, scan_acc = time_scans(scan_fn, pairs, args.step)
        kkt_t, kkt_acc = time_allocs(kkt_fn, spectrum, margins)
        results[name] = (scan_t, kkt_t)
        print(f"{name:>6}: scan {args.scans * 2:5d} calls in {scan_t:7.3f} s "
              f"({args.scans * 2 / scan_t:8.1f}/s, checksum {scan_acc:.6f})")
        print(f"{name:>6}: kkt  {args.allocs:5d} calls in {kkt_t:7.3f} s "
              f"({args.allocs / kkt_t:8.1f}/s, checksum {kkt_acc:.6f})")

    if len(results) == 2:
        scan_speedup = results["numpy"][0] / results["numba"][0]
        kkt_speedup = results["numpy"][1] / results["numba"][1]
        print(f"speedup numba/numpy: scan x{scan_speedup:.1f}, kkt x{kkt_speedup:.1f}")


if __name__ == "__main__":
    main()
