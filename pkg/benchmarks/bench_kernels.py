"""Compare the compiled and NumPy kernel backends.

    python benchmarks/bench_kernels.py [--trials 300]

Times each kernel in isolation on realistic shapes, then a full
Monte Carlo sweep with the backend forced through ``GSA_RELAY_BACKEND``.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from gsa_relay import _kernels_py

try:
    from gsa_relay import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

SWEEP_SNIPPET = (
    "import time; from gsa_relay import metrics, BACKEND; t=time.perf_counter(); "
    "metrics.monte_carlo_sweep({m}, {n}, list(range(0, 51, 1)), {trials}, 42); "
    "print(BACKEND, time.perf_counter()-t)"
)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def hpd(rng, n):
    b = crandn(rng, n, n)
    return b @ b.conj().T + np.eye(n)


def kernel_cases(m, points):
    rng = np.random.default_rng(0)
    sig = np.stack([hpd(rng, m) for _ in range(4)])
    noise = np.stack([hpd(rng, m) for _ in range(4)])
    ps = np.logspace(-3, 3, points)
    beta2 = np.linspace(0.1, 2.0, points)
    return {
        f"log2det_hpd {m}x{m}": lambda k: k.log2det_hpd(sig[0]),
        f"inv {m}x{m}": lambda k: k.inv(sig[0]),
        f"af_rate_grid M={m}, {points} pts": lambda k: k.af_rate_grid(sig, noise, ps, beta2, 1.0),
    }


def bench(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=5)) / number * 1e6


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=300)
    args = parser.parse_args()
    backends = [_kernels_py] + ([_kernels_c] if _kernels_c else [])
    if _kernels_c is None:
        print("compiled kernels not built; only the NumPy fallback is timed")

    print(f"{'kernel':34s}" + "".join(f"{k.BACKEND:>12s}" for k in backends) + "   (us/call)")
    for m, points in [(2, 11), (4, 51), (6, 51)]:
        for name, case in kernel_cases(m, points).items():
            row = [bench(lambda: case(k), 2000) for k in backends]
            speedup = f"   x{row[0] / row[1]:.1f}" if len(row) == 2 else ""
            print(f"{name:34s}" + "".join(f"{t:12.2f}" for t in row) + speedup)

    print("\nend-to-end sweep, 51 SNR points")
    for m, n in [(2, 5), (4, 10)]:
        for backend in [k.BACKEND for k in backends]:
            env = dict(os.environ, GSA_RELAY_BACKEND=backend)
            out = subprocess.run(
                [sys.executable, "-c", SWEEP_SNIPPET.format(m=m, n=n, trials=args.trials)],
                env=env, capture_output=True, text=True, check=True,
            ).stdout.split()
            print(f"  M={m}, N={n}, {args.trials} trials, {out[0]:>8s}: {float(out[1]):.2f}s")


if __name__ == "__main__":
    main()
