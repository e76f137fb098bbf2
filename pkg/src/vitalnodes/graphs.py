"""Graph container, edge-list I/O, synthetic generation, and traversal
primitives shared by every other module.

Graphs are undirected, unweighted, and simple. Nodes carry dense internal
ids ``0..n-1``; external labels live only in :class:`NodeMap`. Adjacency
is stored CSR-style (``indptr`` int64, ``indices`` int32, neighbors sorted
per node), which is the layout the kernel backends consume directly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import DataError, UsageError
from .rng import Stream, derive_seed
from . import _kernels


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    ``alive`` marks nodes that are still part of the network after
    :func:`remove_nodes`; removed nodes keep their id but have no incident
    edges and do not count as components. On freshly built graphs every
    node is alive.
    """

    n: int
    m: int
    indptr: np.ndarray
    indices: np.ndarray
    alive: np.ndarray

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr).astype(np.int64)

    @property
    def n_alive(self) -> int:
        return int(self.alive.sum())

    def edges(self) -> Iterable[tuple[int, int]]:
        """Yield each undirected edge once, as (u, v) with u < v."""
        for u in range(self.n):
            for v in self.neighbors(u):
                if u < v:
                    yield u, int(v)

    def dense_adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=np.float64)
        for u in range(self.n):
            a[u, self.neighbors(u)] = 1.0
        return a

    @staticmethod
    def from_edges(n: int, pairs: Iterable[tuple[int, int]],
                   alive: np.ndarray | None = None) -> "Graph":
        """Build a graph from possibly messy edge pairs.

        Self-loops are dropped and duplicate edges collapsed; both
        orientations are stored.
        """
        us, vs = [], []
        for u, v in pairs:
            if u == v:
                continue
            us.append(u)
            vs.append(v)
        if us:
            u_arr = np.asarray(us + vs, dtype=np.int64)
            v_arr = np.asarray(vs + us, dtype=np.int64)
            codes = np.unique(u_arr * n + v_arr)
            u_arr = codes // n
            v_arr = (codes % n).astype(np.int32)
        else:
            u_arr = np.empty(0, dtype=np.int64)
            v_arr = np.empty(0, dtype=np.int32)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(u_arr, minlength=n), out=indptr[1:])
        if alive is None:
            alive = np.ones(n, dtype=bool)
        # codes are sorted by (u, v), so each row of v_arr is already sorted
        return Graph(n=n, m=len(v_arr) // 2, indptr=indptr,
                     indices=v_arr, alive=alive)


@dataclass
class NodeMap:
    """Bijection between external labels and dense internal ids."""

    labels: list[str] = field(default_factory=list)
    index: dict[str, int] = field(default_factory=dict)

    @staticmethod
    def identity(n: int) -> "NodeMap":
        labels = [str(i) for i in range(n)]
        return NodeMap(labels=labels, index={s: i for i, s in enumerate(labels)})

    def intern(self, label: str) -> int:
        ix = self.index.get(label)
        if ix is None:
            ix = len(self.labels)
            self.labels.append(label)
            self.index[label] = ix
        return ix

    def label(self, node_id: int) -> str:
        return self.labels[node_id]

    def id(self, label: str) -> int:
        return self.index[label]


def load_edge_list(source: str | TextIO) -> tuple[Graph, NodeMap]:
    """Parse a whitespace-separated edge list.

    ``source`` is either the text itself or an open text stream; use
    :func:`load_edge_list_path` for files. Lines starting with '#' or '%'
    are comments. Each data line needs at least two tokens (extra columns
    are ignored); a lone token would mean an isolated node, which this
    format does not support.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    nodemap = NodeMap()
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise DataError(
                f"line {lineno}: expected at least 2 tokens, got {len(tokens)}")
        u = nodemap.intern(tokens[0])
        v = nodemap.intern(tokens[1])
        pairs.append((u, v))
    if not pairs:
        raise DataError("empty graph: no edges found")
    g = Graph.from_edges(len(nodemap.labels), pairs)
    if g.m == 0:
        raise DataError("empty graph: only self-loops found")
    return g, nodemap


def load_edge_list_path(path: str) -> tuple[Graph, NodeMap]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_edge_list(fh)
    except OSError as exc:
        raise DataError(f"cannot read edge list {path!r}: {exc}") from exc


def save_edge_list(g: Graph, nodemap: NodeMap, target: str | TextIO) -> None:
    """Write one edge per line using external labels; round-trips with
    :func:`load_edge_list` up to node relabeling."""
    own = isinstance(target, str)
    fh = open(target, "w", encoding="utf-8", newline="\n") if own else target
    try:
        for u, v in g.edges():
            fh.write(f"{nodemap.label(u)} {nodemap.label(v)}\n")
    finally:
        if own:
            fh.close()


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """Preferential-attachment graph.

    Starts from a complete graph on the first ``m`` nodes; every later
    node attaches to ``m`` distinct existing nodes drawn with probability
    proportional to their degree at the start of the step (already-picked
    nodes are excluded from later draws of the same step). The edge count
    is therefore exactly ``m*(n-m) + m*(m-1)/2`` and the graph is
    connected.
    """
    if m < 1:
        raise UsageError(f"edges per new node must be >= 1, got {m}")
    if n <= m:
        raise UsageError(f"node count must exceed edges per step ({n} <= {m})")
    stream = Stream(derive_seed(seed, 0x0BA))
    deg = np.zeros(n, dtype=np.float64)
    deg[:m] = m - 1
    pairs: list[tuple[int, int]] = [(i, j) for i in range(m) for j in range(i + 1, m)]
    for v in range(m, n):
        avail = np.ones(v, dtype=bool)
        chosen: list[int] = []
        for _ in range(m):
            weights = np.where(avail, deg[:v], 0.0)
            total = float(weights.sum())
            if total > 0.0:
                cands = np.flatnonzero(weights > 0.0)
                cum = np.cumsum(weights[cands])
                k = int(np.searchsorted(cum, stream.double() * total, side="right"))
                target = int(cands[min(k, len(cands) - 1)])
            else:
                # only zero-degree candidates left (m=1 seed node): uniform
                cands = np.flatnonzero(avail)
                target = int(cands[int(stream.double() * len(cands))])
            avail[target] = False
            chosen.append(target)
        for t in chosen:
            pairs.append((v, t))
            deg[t] += 1.0
        deg[v] = float(m)
    return Graph.from_edges(n, pairs)


def adjacency_csr(g: Graph):
    """Adjacency matrix as a scipy CSR matrix (float64)."""
    from scipy import sparse

    data = np.ones(len(g.indices), dtype=np.float64)
    return sparse.csr_matrix((data, g.indices, g.indptr), shape=(g.n, g.n))


def laplacian(g: Graph) -> np.ndarray:
    """Dense combinatorial Laplacian: degree on the diagonal, -1 per edge."""
    lap = np.zeros((g.n, g.n), dtype=np.float64)
    degs = g.degrees
    for u in range(g.n):
        lap[u, g.neighbors(u)] = -1.0
        lap[u, u] = degs[u]
    return lap


@dataclass
class BfsLayers:
    """Single-source BFS result: hop distances, shortest-path counts, and
    predecessor lists on the shortest-path DAG. Unreachable nodes have
    dist -1 and sigma 0."""

    dist: np.ndarray
    sigma: np.ndarray
    predecessors: list[np.ndarray]


def bfs_layers(g: Graph, source: int) -> BfsLayers:
    if not 0 <= source < g.n:
        raise UsageError(f"source {source} outside [0, {g.n})")
    dist, sigma = _kernels.bfs_sigma(g.indptr, g.indices, source)
    preds: list[np.ndarray] = []
    for v in range(g.n):
        if dist[v] <= 0:
            preds.append(np.empty(0, dtype=np.int32))
            continue
        nbrs = g.neighbors(v)
        preds.append(nbrs[dist[nbrs] == dist[v] - 1])
    return BfsLayers(dist=dist, sigma=sigma, predecessors=preds)


def connected_component_sizes(g: Graph) -> list[int]:
    """Sizes of connected components over alive nodes, descending."""
    seen = ~g.alive
    seen = seen.copy()
    sizes: list[int] = []
    stack: list[int] = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        stack.append(s)
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in g.neighbors(u):
                if not seen[v]:
                    seen[v] = True
                    stack.append(int(v))
        sizes.append(size)
    sizes.sort(reverse=True)
    return sizes


def largest_component_size(g: Graph) -> int:
    sizes = connected_component_sizes(g)
    return sizes[0] if sizes else 0


def remove_nodes(g: Graph, victims: Iterable[int]) -> Graph:
    """Induced subgraph on the surviving nodes.

    Survivors keep their original ids; victims become permanently dead
    isolates so that removal-ratio bookkeeping stays aligned with the
    original node count.
    """
    victim_arr = np.asarray(sorted(set(int(v) for v in victims)), dtype=np.int64)
    if victim_arr.size and (victim_arr[0] < 0 or victim_arr[-1] >= g.n):
        raise UsageError("victim id outside [0, n)")
    alive = g.alive.copy()
    alive[victim_arr] = False
    pairs = [(u, v) for u, v in g.edges() if alive[u] and alive[v]]
    return Graph.from_edges(g.n, pairs, alive=alive)


def degree_powerlaw_exponent(g: Graph, kmin: int | None = None) -> float:
    """Log-log slope fit of the degree CCDF, reported as the density
    exponent (CCDF slope is 1 - exponent)."""
    degs = g.degrees
    degs = degs[degs > 0]
    if kmin is None:
        kmin = int(degs.min())
    ks = np.unique(degs)
    ks = ks[ks >= kmin]
    if len(ks) < 3:
        raise DataError("not enough distinct degrees for a slope fit")
    ccdf = np.array([(degs >= k).mean() for k in ks])
    slope = np.polyfit(np.log(ks), np.log(ccdf), 1)[0]
    return 1.0 - slope
