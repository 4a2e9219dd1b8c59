"""Compare the compiled core with the NumPy fallback.

    python3 benchmarks/bench_core.py [--rows 400000] [--samples 200000]

Times the batched generic-norm kernel on random box candidates and a full
Monte Carlo Hua estimate, and checks both backends agree.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from kernelforge import core, domains as dom, verify

DOMAINS = ("I:1,1", "I:2,2", "I:2,3", "II:2", "II:4", "III:2", "III:3", "IV:3")


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=int, default=400_000)
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = sorted(core.BACKENDS)
    print(f"default backend: {core.BACKEND}; available: {', '.join(backends)}")
    if "compiled" not in backends:
        print("compiled core not built; only the fallback can be timed")

    rng = np.random.default_rng(0)
    print(f"\ndiag_norm_batch, {args.rows} rows")
    print(f"{'domain':<8}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for spec in DOMAINS:
        d = dom.parse_domain(spec)
        coords = rng.uniform(-1.0, 1.0, size=(args.rows, 2 * d.n_coords()))
        times, outs = {}, {}
        for b in backends:
            outs[b] = core.diag_norm_batch(d, coords, backend=b)
            times[b] = best_of(lambda: core.diag_norm_batch(d, coords, backend=b), args.repeat)
        if len(outs) == 2:
            a, p = outs["compiled"], outs["python"]
            assert np.array_equal(a > 0, p > 0), spec
            assert np.allclose(a, p, atol=1e-12), spec
        speed = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        print(f"{spec:<8}" + "".join(f"{times[b]:>11.3f}s" for b in backends) + f"{speed:>9.1f}x")

    print(f"\nmc_hua I:2,2 s=1, {args.samples} accepted samples")
    d = dom.TypeI(2, 2)
    for b in backends:
        t0 = time.perf_counter()
        est = verify.mc_hua(d, 1.0, args.samples, seed=1, backend=b)
        dt = time.perf_counter() - t0
        print(f"{b:<10} {dt:8.2f}s  mean={est.mean:.6f} stderr={est.stderr:.2e}")


if __name__ == "__main__":
    main()
