"""Cross-backend contract tests: the compiled kernels and the NumPy
fallback must agree. Integer-valued outputs (BFS, path counts, SIR) are
required to be bit-identical; skip-gram training may differ only within
floating-point reassociation of dot products."""

import numpy as np
import pytest

from conftest import random_graph

from vitalnodes._kernels import _pykernels as pyk
from vitalnodes.graphs import generate_ba

ck = pytest.importorskip("vitalnodes._kernels._ckernels",
                         reason="compiled kernels not built")


@pytest.fixture(scope="module")
def graphs():
    return [generate_ba(80, 2, seed=1),
            generate_ba(50, 3, seed=2),
            random_graph(40, 0.1, 3)]


def test_backend_names():
    assert pyk.BACKEND == "python"
    assert ck.BACKEND == "compiled"


def test_bfs_sigma_exact(graphs):
    for g in graphs:
        for source in (0, g.n // 2, g.n - 1):
            d1, s1 = pyk.bfs_sigma(g.indptr, g.indices, source)
            d2, s2 = ck.bfs_sigma(g.indptr, g.indices, source)
            assert np.array_equal(d1, d2)
            assert np.array_equal(s1, s2)


def test_betweenness_counts_exact(graphs):
    for g in graphs:
        t1, den1 = pyk.betweenness_counts(g.indptr, g.indices)
        t2, den2 = ck.betweenness_counts(g.indptr, g.indices)
        assert np.array_equal(t1, t2)
        assert den1 == den2


def test_distance_stats_exact(graphs):
    rng = np.random.default_rng(0)
    for g in graphs:
        for _ in range(3):
            alive = (rng.random(g.n) > 0.2).astype(np.uint8)
            out1 = pyk.distance_stats(g.indptr, g.indices, alive)
            out2 = ck.distance_stats(g.indptr, g.indices, alive)
            for a, b in zip(out1, out2):
                assert np.array_equal(a, b)


def test_sir_single_exact(graphs):
    seeds = np.array([0, 3, 11], dtype=np.int32)
    for g in graphs:
        for rng_seed in (5, 99, 12345):
            for beta, gamma in ((0.3, 1.0), (0.7, 0.4), (1.0, 1.0)):
                r1 = pyk.sir_single(g.indptr, g.indices, seeds, beta, gamma,
                                    rng_seed, 500)
                r2 = ck.sir_single(g.indptr, g.indices, seeds, beta, gamma,
                                   rng_seed, 500)
                for a, b in zip(r1, r2):
                    assert np.array_equal(a, b)


def test_sir_final_mean_exact(graphs):
    for g in graphs:
        f1 = pyk.sir_final_mean(g.indptr, g.indices, 0.25, 1.0, 15, 777, 500)
        f2 = ck.sir_final_mean(g.indptr, g.indices, 0.25, 1.0, 15, 777, 500)
        assert np.array_equal(f1, f2)


def test_sir_curve_exact(graphs):
    seeds = np.array([1, 2], dtype=np.int32)
    for g in graphs:
        c1 = pyk.sir_curve(g.indptr, g.indices, seeds, 0.35, 1.0, 40, 31, 500)
        c2 = ck.sir_curve(g.indptr, g.indices, seeds, 0.35, 1.0, 40, 31, 500)
        assert np.array_equal(c1, c2)


def test_sgns_within_float_reassociation():
    g = generate_ba(30, 2, seed=4)
    rng = np.random.default_rng(1)
    tokens = rng.integers(0, g.n, size=400).astype(np.int32)
    offsets = np.array([0, 200, 400], dtype=np.int64)
    weights = g.degrees.astype(np.float64) ** 0.75
    cdf = np.cumsum(weights) / weights.sum()
    cdf[-1] = 1.0
    w_in = (rng.random((g.n, 8)) - 0.5) / 8
    w_out = np.zeros((g.n, 8))
    w_in2, w_out2 = w_in.copy(), w_out.copy()

    def budget():
        total = 0
        for length in (200, 200):
            for c in range(length):
                total += min(length - 1, c + 4) - max(0, c - 4)
        return total * 3

    total = budget()
    l1 = pyk.sgns_train(tokens, offsets, w_in, w_out, cdf, 4, 5, 3,
                        0.05, 0.05e-4, 2024, total)
    l2 = ck.sgns_train(tokens, offsets, w_in2, w_out2, cdf, 4, 5, 3,
                       0.05, 0.05e-4, 2024, total)
    assert np.allclose(l1, l2, rtol=0, atol=1e-9)
    assert np.allclose(w_in, w_in2, rtol=0, atol=1e-9)
    assert np.allclose(w_out, w_out2, rtol=0, atol=1e-9)


def test_rng_streams_identical():
    # the Python Stream and the C helpers draw the same deviates, which is
    # what makes the SIR kernels bit-identical; check indirectly through a
    # degenerate simulation whose trajectory encodes the draws
    g = generate_ba(25, 2, seed=6)
    seeds = np.array([0], dtype=np.int32)
    for rng_seed in range(20):
        r1 = pyk.sir_single(g.indptr, g.indices, seeds, 0.5, 0.5, rng_seed, 200)
        r2 = ck.sir_single(g.indptr, g.indices, seeds, 0.5, 0.5, rng_seed, 200)
        for a, b in zip(r1, r2):
            assert np.array_equal(a, b)
