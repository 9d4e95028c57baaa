"""Benchmark the numpy and numba backends of the two hot kernels.

Both backends must agree bit for bit, so this script first cross-checks the
outputs on each workload and then reports best-of-N wall times. Select the
backend used by the library itself with TSE_FORGE_BACKEND=numba|numpy.

The numba k-NN kernel wins at small and medium shapes; for very large
pool x dim products the BLAS matmul inside the numpy path overtakes it
(try --frames 400 --pool 4096 --dim 256 to see the crossover).

Usage:
    python3 benchmarks/bench_kernels.py [--seconds 30] [--frames 128]
        [--pool 1024] [--dim 64] [--repeats 5]
"""

import argparse
import time

import numpy as np
from scipy.signal import lfilter

from tseforge._accel import np_kernels

try:
    from tseforge._accel import nb_kernels
except ImportError:
    nb_kernels = None


def envelope_workload(seconds, rng):
    """Envelope, thresholds, and hangover as the level estimator uses them."""
    fs = 16000
    n = int(seconds * fs)
    x = rng.normal(0.0, 0.05, n) * (rng.uniform(size=n) > 0.3)
    g = np.exp(-1.0 / (fs * 0.03))
    env = lfilter([1.0 - g], [1.0, -g], np.abs(x))
    env = lfilter([1.0 - g], [1.0, -g], env)
    thresholds = 2.0 ** np.arange(-15, 0, dtype=np.float64)
    return (env, thresholds, 3200)


def knn_workload(frames, pool, dim, rng):
    return (rng.normal(size=(frames, dim)), rng.normal(size=(pool, dim)), 4)


def best_of(fn, args, repeats):
    best = np.inf
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def bench(name, np_fn, nb_fn, args, repeats):
    reference = np_fn(*args)
    if nb_fn is not None:
        nb_fn(*args)  # warm the JIT before timing
        if not np.array_equal(reference, nb_fn(*args)):
            raise SystemExit(f"{name}: backends disagree")
    t_np = best_of(np_fn, args, repeats)
    if nb_fn is None:
        print(f"{name:<16} numpy {t_np * 1e3:8.2f} ms   numba unavailable")
        return
    t_nb = best_of(nb_fn, args, repeats)
    print(
        f"{name:<16} numpy {t_np * 1e3:8.2f} ms   numba {t_nb * 1e3:8.2f} ms"
        f"   speedup {t_np / t_nb:5.2f}x"
    )


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seconds", type=float, default=30.0, help="envelope length")
    ap.add_argument("--frames", type=int, default=128, help="k-NN query frames")
    ap.add_argument("--pool", type=int, default=1024, help="k-NN pool frames")
    ap.add_argument("--dim", type=int, default=64, help="k-NN feature dim")
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    print(f"numba available: {nb_kernels is not None}")
    bench(
        "active_counts",
        np_kernels.active_counts,
        None if nb_kernels is None else nb_kernels.active_counts,
        envelope_workload(args.seconds, rng),
        args.repeats,
    )
    bench(
        "knn_mean",
        np_kernels.knn_mean,
        None if nb_kernels is None else nb_kernels.knn_mean,
        knn_workload(args.frames, args.pool, args.dim, rng),
        args.repeats,
    )


if __name__ == "__main__":
    main()
