"""Shared fixtures: exhaustive small-graph classes and real-dataset gating."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from util_enum import connected_graph_classes  # noqa: E402

from vitalnodes.graphs import Graph  # noqa: E402


def graph_from_adj(adj: list[list[int]]) -> Graph:
    pairs = [(u, v) for u, nbrs in enumerate(adj) for v in nbrs if u < v]
    return Graph.from_edges(len(adj), pairs)


@pytest.fixture(scope="session")
def graph_classes_small():
    """All connected-graph classes with up to 6 nodes (fast)."""
    return connected_graph_classes(6)


@pytest.fixture(scope="session")
def graph_classes_full():
    """All connected-graph classes with up to 8 nodes (the acceptance set)."""
    return connected_graph_classes(8)


def dataset_dir() -> Path:
    return Path(os.environ.get("VITALNODES_DATA", "data/real"))


def require_dataset(name: str) -> Path:
    """Path to a real-network edge list, or a skip with instructions.

    The real datasets are not redistributable with the package; drop their
    edge lists into data/real/ (or point VITALNODES_DATA at them) to enable
    the full acceptance run. See README, section "Real datasets".
    """
    path = dataset_dir() / name
    if not path.exists():
        pytest.skip(f"real dataset {name} not present under {dataset_dir()} "
                    "(see README section 'Real datasets')")
    return path


def line_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i + 1) for i in range(leaves)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(n: int, p: float, seed: int) -> Graph:
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)
             if rng.random() < p]
    return Graph.from_edges(n, pairs)
