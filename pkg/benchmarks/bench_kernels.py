#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Runs each kernel on the same inputs under both backends, reports wall
times and speedups, and cross-checks that the outputs agree (exactly for
the integer-valued kernels, to float reassociation for skip-gram).

Usage: python benchmarks/bench_kernels.py [--n 2000] [--sir-runs 200]
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from vitalnodes._kernels import _pykernels as pyk
from vitalnodes.embedding import random_walks
from vitalnodes.graphs import generate_ba
from vitalnodes.rng import Stream, derive_seed

try:
    from vitalnodes._kernels import _ckernels as ck
except ImportError:
    print("compiled kernels are not built; install with a C compiler "
          "(pip install -e . --no-build-isolation)")
    sys.exit(1)


def timed(fn, *args, repeat=1):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def check_equal(a, b, exact=True, label=""):
    items_a = a if isinstance(a, tuple) else (a,)
    items_b = b if isinstance(b, tuple) else (b,)
    for x, y in zip(items_a, items_b):
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if exact:
            assert np.array_equal(x, y), f"{label}: backend mismatch"
        else:
            assert np.allclose(x, y, rtol=0, atol=1e-9), f"{label}: mismatch"


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=2000,
                        help="benchmark graph size")
    parser.add_argument("--sir-runs", type=int, default=200)
    args = parser.parse_args()

    g = generate_ba(args.n, 2, seed=1)
    print(f"benchmark graph: scale-free, n={g.n}, m={g.m}")
    print(f"{'kernel':<22}{'python':>12}{'compiled':>12}{'speedup':>10}")

    rows = []

    def bench(name, fn_name, fn_args, exact=True, py_args=None):
        py_out, t_py = timed(getattr(pyk, fn_name), *(py_args or fn_args))
        c_out, t_c = timed(getattr(ck, fn_name), *fn_args)
        check_equal(py_out, c_out, exact=exact, label=name)
        rows.append((name, t_py, t_c))
        print(f"{name:<22}{t_py:>11.3f}s{t_c:>11.3f}s{t_py / t_c:>9.1f}x")

    bench("betweenness_counts", "betweenness_counts", (g.indptr, g.indices))

    alive = np.ones(g.n, dtype=np.uint8)
    bench("distance_stats", "distance_stats", (g.indptr, g.indices, alive))

    beta = 0.1
    bench("sir_final_mean", "sir_final_mean",
          (g.indptr, g.indices, beta, 1.0, args.sir_runs, 7, 10_000))

    seeds = np.arange(g.n // 20, dtype=np.int32)
    bench("sir_curve", "sir_curve",
          (g.indptr, g.indices, seeds, beta, 1.0, 1000, 7, 10_000))

    small = generate_ba(300, 2, seed=2)
    corpus = random_walks(small, walks_per_node=4, walk_length=40, seed=3)
    tokens = np.concatenate(corpus.walks).astype(np.int32)
    lengths = np.array([len(w) for w in corpus.walks], dtype=np.int64)
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    weights = small.degrees.astype(np.float64) ** 0.75
    cdf = np.cumsum(weights) / weights.sum()
    cdf[-1] = 1.0
    window, negatives, epochs, lr = 5, 5, 2, 0.025
    total = epochs * sum(
        min(le - 1, c + window) - max(0, c - window)
        for le in lengths for c in range(le))
    init = Stream(derive_seed(3, 0x71D9))
    w_in = (init.doubles(small.n * 64).reshape(small.n, 64) - 0.5) / 64
    w_out = np.zeros((small.n, 64))
    w_in2, w_out2 = w_in.copy(), w_out.copy()
    bench("sgns_train (n=300)", "sgns_train",
          (tokens, offsets, w_in, w_out, cdf, window, negatives, epochs,
           lr, lr * 1e-4, 9, total),
          exact=False,
          py_args=(tokens, offsets, w_in2, w_out2, cdf, window, negatives,
                   epochs, lr, lr * 1e-4, 9, total))

    total_py = sum(r[1] for r in rows)
    total_c = sum(r[2] for r in rows)
    print(f"{'total':<22}{total_py:>11.3f}s{total_c:>11.3f}s"
          f"{total_py / total_c:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
