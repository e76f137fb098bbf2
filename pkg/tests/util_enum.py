"""Exhaustive generation of small connected graphs, one per isomorphism
class, for oracle-equivalence tests.

Graphs on k+1 nodes are built by attaching a new node to every nonempty
subset of each k-node class representative; every connected graph arises
this way because a spanning tree always has a leaf. Deduplication uses a
canonical form: color refinement (degrees, then neighbor-color multisets,
to a fixed point) restricts the candidate relabelings, and the maximal
packed adjacency bitstring over the remaining permutations is the class
key. The generator self-checks against the known class counts, which would
catch both over- and under-merging.
"""

from __future__ import annotations

from itertools import permutations, product

import numpy as np

# number of connected graphs on n unlabeled nodes, n = 1..8
CONNECTED_CLASS_COUNTS = [1, 1, 2, 6, 21, 112, 853, 11117]


def _refine_colors(adj: list[list[int]]) -> list[int]:
    n = len(adj)
    colors = [len(adj[v]) for v in range(n)]
    for _ in range(n):
        sigs = [(colors[v], tuple(sorted(colors[u] for u in adj[v])))
                for v in range(n)]
        palette = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        new = [palette[sig] for sig in sigs]
        if new == colors:
            break
        colors = new
    return colors


def _color_respecting_perms(colors: list[int]) -> list[tuple[int, ...]]:
    """All node orderings that sort nodes by color and permute freely only
    within a color class."""
    classes: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        classes.setdefault(c, []).append(v)
    groups = [classes[c] for c in sorted(classes)]
    perms = []
    for combo in product(*(permutations(g) for g in groups)):
        flat: list[int] = []
        for part in combo:
            flat.extend(part)
        perms.append(tuple(flat))
    return perms


_TRIU_CACHE: dict[int, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}


def _triu_info(n: int):
    if n not in _TRIU_CACHE:
        iu = np.triu_indices(n, k=1)
        weights = 1 << np.arange(len(iu[0]), dtype=np.int64)
        _TRIU_CACHE[n] = (iu[0], iu[1], weights)
    return _TRIU_CACHE[n]


def canonical_key(adj: list[list[int]]) -> int:
    """Maximal packed upper-triangle bitstring over color-respecting
    relabelings; equal for two graphs iff they are isomorphic."""
    n = len(adj)
    rows, cols, weights = _triu_info(n)
    a = np.zeros((n, n), dtype=bool)
    for v, nbrs in enumerate(adj):
        a[v, nbrs] = True
    perms = np.array(_color_respecting_perms(_refine_colors(adj)),
                     dtype=np.int64)
    permuted = a[perms[:, :, None], perms[:, None, :]]
    packed = permuted[:, rows, cols] @ weights
    return int(packed.max())


def _connected(adj: list[list[int]]) -> bool:
    n = len(adj)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 0
    while stack:
        v = stack.pop()
        count += 1
        for u in adj[v]:
            if not seen[u]:
                seen[u] = True
                stack.append(u)
    return count == n


def connected_graph_classes(max_n: int) -> dict[int, list[list[list[int]]]]:
    """One adjacency-list representative per connected-graph isomorphism
    class, for every node count 1..max_n. Asserts the known class counts."""
    assert 1 <= max_n <= 8
    reps: dict[int, list[list[list[int]]]] = {1: [[[]]]}
    for k in range(1, max_n):
        seen: dict[int, list[list[int]]] = {}
        for parent in reps[k]:
            for subset in range(1, 1 << k):
                adj = [list(nbrs) for nbrs in parent] + [[]]
                for u in range(k):
                    if subset >> u & 1:
                        adj[u].append(k)
                        adj[k].append(u)
                key = canonical_key(adj)
                if key not in seen:
                    seen[key] = adj
        reps[k + 1] = list(seen.values())
    for n in range(1, max_n + 1):
        expected = CONNECTED_CLASS_COUNTS[n - 1]
        assert len(reps[n]) == expected, (
            f"enumeration bug: {len(reps[n])} classes on {n} nodes, "
            f"expected {expected}")
        for adj in reps[n]:
            assert _connected(adj)
    return reps
