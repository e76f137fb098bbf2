"""Random-walk node embeddings: uniform walks plus skip-gram training with
negative sampling. Used by the embedding-based hybrid centrality and as
initial features for the plain GCN/GAT ranking baselines.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import _kernels
from .errors import DataError, UsageError
from .graphs import Graph, NodeMap
from .rng import Stream, derive_seed

_SHUFFLE_TAG = 0x3A1F
_WALK_TAG = 0x5C2B
_INIT_TAG = 0x71D9
_TRAIN_TAG = 0x92E4


@dataclass(frozen=True)
class WalkCorpus:
    """Node-id sequences; every consecutive pair is an edge of the source
    graph. Walks shorter than ``walk_length`` ended at a neighborless node."""

    walks: list[np.ndarray]
    walk_length: int
    walks_per_node: int


@dataclass(frozen=True)
class EmbeddingTable:
    """One d-dimensional vector per node, plus the training loss trace."""

    vectors: np.ndarray
    epoch_loss: np.ndarray

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


def random_walks(g: Graph, walks_per_node: int = 10, walk_length: int = 80,
                 seed: int = 0) -> WalkCorpus:
    """Uniform-neighbor walks, ``walks_per_node`` rounds over the nodes in a
    freshly shuffled order per round."""
    if walk_length < 2:
        raise UsageError("walk_length must be >= 2")
    if g.m < 1:
        raise DataError("random walks need a graph with at least one edge")
    walks: list[np.ndarray] = []
    for rnd in range(walks_per_node):
        order = np.arange(g.n, dtype=np.int64)
        Stream(derive_seed(seed, _SHUFFLE_TAG, rnd)).shuffle(order)
        for start in order:
            stream = Stream(derive_seed(seed, _WALK_TAG, rnd * g.n + int(start)))
            u = stream.doubles(walk_length - 1)
            walk = np.empty(walk_length, dtype=np.int32)
            walk[0] = start
            cur = int(start)
            length = 1
            for step in range(walk_length - 1):
                nbrs = g.neighbors(cur)
                if nbrs.size == 0:
                    break
                cur = int(nbrs[int(u[step] * nbrs.size)])
                walk[length] = cur
                length += 1
            walks.append(walk[:length])
    return WalkCorpus(walks=walks, walk_length=walk_length,
                      walks_per_node=walks_per_node)


def _pair_budget(lengths: np.ndarray, window: int) -> int:
    total = 0
    for length in lengths:
        for c in range(length):
            total += min(length - 1, c + window) - max(0, c - window)
    return total


def train_skip_gram(g: Graph, corpus: WalkCorpus, dim: int = 64,
                    window: int = 5, negatives: int = 5, epochs: int = 5,
                    lr: float = 0.025, seed: int = 0) -> EmbeddingTable:
    """Skip-gram with negative sampling over the walk corpus.

    Negative samples are drawn proportionally to degree^0.75; the learning
    rate decays linearly to lr/10000 over all updates. Training is
    sequential so a fixed seed reproduces the table exactly.
    """
    if dim < 2:
        raise UsageError("embedding dimension must be >= 2")
    tokens = np.concatenate(corpus.walks).astype(np.int32)
    lengths = np.array([len(w) for w in corpus.walks], dtype=np.int64)
    offsets = np.zeros(len(lengths) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    weights = g.degrees.astype(np.float64) ** 0.75
    total_w = weights.sum()
    if total_w <= 0.0:
        raise DataError("cannot build a sampling table on an edgeless graph")
    neg_cdf = np.cumsum(weights) / total_w
    neg_cdf[-1] = 1.0
    init = Stream(derive_seed(seed, _INIT_TAG))
    w_in = (init.doubles(g.n * dim).reshape(g.n, dim) - 0.5) / dim
    w_out = np.zeros((g.n, dim), dtype=np.float64)
    total_updates = epochs * _pair_budget(lengths, window)
    losses = _kernels.sgns_train(tokens, offsets, w_in, w_out, neg_cdf,
                                 window, negatives, epochs, lr, lr * 1e-4,
                                 derive_seed(seed, _TRAIN_TAG),
                                 max(total_updates, 1))
    return EmbeddingTable(vectors=w_in, epoch_loss=losses)


def embed_graph(g: Graph, dim: int = 64, walks_per_node: int = 10,
                walk_length: int = 80, window: int = 5, negatives: int = 5,
                epochs: int = 5, lr: float = 0.025, seed: int = 0) -> EmbeddingTable:
    """Walks plus skip-gram in one call with the standard defaults."""
    corpus = random_walks(g, walks_per_node=walks_per_node,
                          walk_length=walk_length, seed=seed)
    return train_skip_gram(g, corpus, dim=dim, window=window,
                           negatives=negatives, epochs=epochs, lr=lr, seed=seed)


def write_embedding_csv(table: EmbeddingTable, nodemap: NodeMap,
                        fh: TextIO) -> None:
    d = table.dim
    fh.write("node_label," + ",".join(f"v{k}" for k in range(d)) + "\n")
    for node in range(table.vectors.shape[0]):
        row = ",".join(repr(float(x)) for x in table.vectors[node])
        fh.write(f"{nodemap.label(node)},{row}\n")


def read_embedding_csv(fh: TextIO, nodemap: NodeMap) -> np.ndarray:
    header = fh.readline().strip().split(",")
    if not header or header[0] != "node_label":
        raise DataError("not an embedding CSV")
    d = len(header) - 1
    n = len(nodemap.labels)
    out = np.zeros((n, d), dtype=np.float64)
    seen = np.zeros(n, dtype=bool)
    for line in fh:
        line = line.strip()
        if not line:
            continue
        parts = line.split(",")
        node = nodemap.id(parts[0])
        out[node] = [float(x) for x in parts[1:]]
        seen[node] = True
    if not seen.all():
        raise DataError("embedding CSV does not cover every node")
    return out
