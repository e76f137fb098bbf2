"""Topology-based node rankings.

Every measure returns a :class:`RankedList`: scores plus a total order
(descending score, ties broken by ascending node id), which is also the
shape of the GNNE output, so downstream evaluation treats all methods
uniformly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import _kernels
from .errors import DataError, UsageError
from .graphs import Graph, NodeMap
from .rng import Stream, derive_seed


@dataclass(frozen=True)
class RankedList:
    """Per-node scores with the induced deterministic ranking."""

    scores: np.ndarray
    order: np.ndarray

    @staticmethod
    def from_scores(scores: np.ndarray) -> "RankedList":
        scores = np.asarray(scores, dtype=np.float64)
        order = np.lexsort((np.arange(len(scores)), -scores))
        return RankedList(scores=scores, order=order.astype(np.int64))

    def top(self, k: int) -> np.ndarray:
        return self.order[:k]


def write_ranking_csv(ranking: RankedList, nodemap: NodeMap,
                      fh: TextIO) -> None:
    fh.write("node_label,score,rank\n")
    for rank, node in enumerate(ranking.order, start=1):
        fh.write(f"{nodemap.label(int(node))},{float(ranking.scores[node])!r},{rank}\n")


def read_ranking_csv(fh: TextIO, nodemap: NodeMap) -> RankedList:
    header = fh.readline().strip()
    if header != "node_label,score,rank":
        raise DataError(f"not a ranking CSV (header {header!r})")
    n = len(nodemap.labels)
    scores = np.zeros(n, dtype=np.float64)
    order = np.full(n, -1, dtype=np.int64)
    for lineno, line in enumerate(fh, start=2):
        line = line.strip()
        if not line:
            continue
        try:
            label, score, rank = line.rsplit(",", 2)
            node = nodemap.id(label)
            order[int(rank) - 1] = node
            scores[node] = float(score)
        except (ValueError, KeyError) as exc:
            raise DataError(f"ranking CSV line {lineno}: {exc}") from exc
    if (order < 0).any():
        raise DataError("ranking CSV does not cover every node of the graph")
    return RankedList(scores=scores, order=order)


def degree_centrality(g: Graph) -> RankedList:
    """Degree over n-1, in [0, 1]."""
    if g.n < 2:
        raise UsageError("degree centrality needs at least 2 nodes")
    return RankedList.from_scores(g.degrees / (g.n - 1))


def k_shell_indices(g: Graph) -> np.ndarray:
    """Shell index per node by iterative peeling: at threshold k, repeatedly
    delete every node whose remaining degree is <= k, then raise k."""
    deg = g.degrees.astype(np.int64)
    shell = np.zeros(g.n, dtype=np.int64)
    removed = np.zeros(g.n, dtype=bool)
    left = g.n
    k = 1
    while left > 0:
        while True:
            hits = np.flatnonzero(~removed & (deg <= k))
            if hits.size == 0:
                break
            shell[hits] = k
            removed[hits] = True
            left -= hits.size
            for v in hits:
                deg[g.neighbors(v)] -= 1
        k += 1
    return shell


def k_shell(g: Graph) -> RankedList:
    return RankedList.from_scores(k_shell_indices(g).astype(np.float64))


def betweenness(g: Graph) -> RankedList:
    """Shortest paths through the node over all shortest paths, as one
    global ratio (ordered pairs in numerator and denominator)."""
    through, denom = _kernels.betweenness_counts(g.indptr, g.indices)
    if denom <= 0.0:
        return RankedList.from_scores(np.zeros(g.n))
    return RankedList.from_scores(through / denom)


def _full_alive(g: Graph) -> np.ndarray:
    return g.alive.astype(np.uint8)


def closeness(g: Graph) -> RankedList:
    """Reachable-node count over summed distances; isolated nodes score 0."""
    sum_d, reach, _ = _kernels.distance_stats(g.indptr, g.indices, _full_alive(g))
    scores = np.divide(reach, sum_d, out=np.zeros(g.n), where=sum_d > 0)
    return RankedList.from_scores(scores)


def harmonic(g: Graph) -> RankedList:
    """Mean reciprocal distance, with unreachable pairs contributing 0."""
    _, _, sum_inv = _kernels.distance_stats(g.indptr, g.indices, _full_alive(g))
    if g.n < 2:
        return RankedList.from_scores(np.zeros(g.n))
    return RankedList.from_scores(sum_inv / (g.n - 1))


def eigenvector(g: Graph, tol: float = 1e-12, max_iter: int = 10_000) -> RankedList:
    """Principal eigenvector of the adjacency matrix by power iteration.

    Iterates A+I so that bipartite graphs converge too (same eigenvectors,
    spectrum shifted off the +/- symmetry); the result is L2-normalized and
    nonnegative. A convergence failure is reported as a warning and the
    last iterate is returned.
    """
    if g.n == 0:
        raise DataError("eigenvector centrality of an empty graph")
    from .graphs import adjacency_csr

    a = adjacency_csr(g)
    v = np.full(g.n, 1.0 / np.sqrt(g.n))
    converged = False
    for _ in range(max_iter):
        w = a @ v + v
        w /= np.linalg.norm(w)
        if np.max(np.abs(w - v)) < tol:
            v = w
            converged = True
            break
        v = w
    if not converged:
        warnings.warn("eigenvector power iteration did not converge; "
                      "returning the last iterate", RuntimeWarning)
    if v.sum() < 0:
        v = -v
    return RankedList.from_scores(v)


def collective_influence(g: Graph, radius: int = 2) -> RankedList:
    """(k_i - 1) times the summed excess degree on the ball frontier at
    exactly ``radius`` hops."""
    if radius < 1:
        raise UsageError(f"collective influence radius must be >= 1, got {radius}")
    excess = (g.degrees - 1).astype(np.float64)
    scores = np.zeros(g.n)
    visited = np.zeros(g.n, dtype=bool)
    for s in range(g.n):
        frontier = np.array([s], dtype=np.int64)
        visited[s] = True
        touched = [frontier]
        for _ in range(radius):
            if frontier.size == 0:
                break
            nxt = np.unique(np.concatenate(
                [g.neighbors(int(u)) for u in frontier])).astype(np.int64)
            nxt = nxt[~visited[nxt]]
            visited[nxt] = True
            touched.append(nxt)
            frontier = nxt
        scores[s] = excess[s] * excess[frontier].sum()
        for arr in touched:
            visited[arr] = False
    return RankedList.from_scores(scores)


def iks(g: Graph) -> RankedList:
    """K-shell groups refined by neighbor-degree entropy.

    The composite score is shell + entropy normalized into [0, 1), so
    shells order first and entropy breaks ties within a shell.
    """
    shell = k_shell_indices(g)
    total_degree = float(g.degrees.sum())
    if total_degree == 0.0:
        return RankedList.from_scores(shell.astype(np.float64))
    frac = g.degrees / total_degree
    term = np.zeros(g.n)
    pos = frac > 0
    term[pos] = -frac[pos] * np.log(frac[pos])
    src = np.repeat(np.arange(g.n), g.degrees)
    entropy = np.bincount(src, weights=term[g.indices], minlength=g.n)
    scores = shell + entropy / (1.0 + entropy.max())
    return RankedList.from_scores(scores)


def gehc(g: Graph, embeddings: np.ndarray) -> RankedList:
    """Embedding-weighted hybrid centrality: neighbor pairs weighted by
    degree*shell products and a Gaussian of embedding distance."""
    emb = np.asarray(embeddings, dtype=np.float64)
    if emb.ndim != 2 or emb.shape[0] != g.n:
        raise DataError(
            f"embedding table shape {emb.shape} does not match {g.n} nodes")
    weight = (g.degrees * k_shell_indices(g)).astype(np.float64)
    src = np.repeat(np.arange(g.n), g.degrees)
    dst = g.indices.astype(np.int64)
    d2 = ((emb[src] - emb[dst]) ** 2).sum(axis=1)
    terms = weight[src] * weight[dst] * np.exp(-d2)
    scores = np.bincount(src, weights=terms, minlength=g.n)
    return RankedList.from_scores(scores)


def random_ranking(g: Graph, seed: int) -> RankedList:
    """Seeded uniform-random scores; the sanity floor for evaluations."""
    stream = Stream(derive_seed(seed, 0x7A2D))
    return RankedList.from_scores(stream.doubles(g.n))
