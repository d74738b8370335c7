"""Time the numba kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

The first numba call compiles; it is timed separately and excluded from
the per-call figures.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

from medkit.kernels import numba_backend, numpy_backend
from _factories import random_ensemble


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    for d in (2, 4, 8):
        e = random_ensemble(d, rng, max_states=4)
        W = np.ascontiguousarray(e.weighted_states)
        Pi0 = np.ascontiguousarray(np.broadcast_to(np.eye(d) / e.N, (e.N, d, d)), dtype=np.complex128)
        sweeps = 2000 if d < 8 else 100  # the numpy path is slow here
        yield f"med_iterate d={d} N={e.N} ({sweeps} sweeps)", lambda b, W=W, Pi0=Pi0, k=sweeps: b.med_iterate(
            W, Pi0, 0.0, k, 1e-300, 1e-12)
    prior = np.cumsum(np.full(6, 1 / 6))
    out = np.cumsum(rng.dirichlet(np.ones(6), size=6), axis=1)
    prior[-1] = 1.0
    out[:, -1] = 1.0
    yield "count_successes 1e6 trials", lambda b: b.count_successes(prior, out, 7, 0, 10**6)
    for d in (4, 16):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        a = np.ascontiguousarray(a + a.conj().T)
        yield f"jacobi_eigh d={d} (x200)", lambda b, a=a: [b.jacobi_eigh(a) for _ in range(200)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if numba_backend is None:
        sys.exit("numba is not importable; nothing to compare")
    print(f"{'kernel':<40} {'numpy [s]':>10} {'numba [s]':>10} {'compile [s]':>11} {'speedup':>8}")
    for name, run in cases():
        t0 = time.perf_counter()
        run(numba_backend)
        first = time.perf_counter() - t0
        tn = best_of(lambda: run(numba_backend), args.repeat)
        tp = best_of(lambda: run(numpy_backend), args.repeat)
        print(f"{name:<40} {tp:10.4f} {tn:10.4f} {max(first - tn, 0):11.3f} {tp / tn:8.1f}")


if __name__ == "__main__":
    main()
