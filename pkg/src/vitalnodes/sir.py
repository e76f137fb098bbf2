"""Discrete-time SIR epidemics.

One synchronous step: every infectious node tries to infect each currently
susceptible neighbor with probability beta, then recovers with probability
gamma; fresh infections become infectious on the next step. Trajectories
are pure functions of (graph, seeds, config, rng seed).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, TextIO

import numpy as np

from . import _kernels
from .centrality import RankedList
from .errors import DataError, UsageError
from .graphs import Graph


@dataclass(frozen=True)
class SirConfig:
    beta: float
    gamma: float = 1.0
    max_steps: int = 10_000

    def __post_init__(self):
        if not 0.0 <= self.beta <= 1.0:
            raise UsageError(f"beta must be in [0, 1], got {self.beta}")
        if not 0.0 <= self.gamma <= 1.0:
            raise UsageError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.max_steps < 1:
            raise UsageError("max_steps must be positive")


@dataclass(frozen=True)
class SirOutcome:
    """Per-step S/I/R counts of one trajectory; index 0 is the seeding."""

    s: np.ndarray
    i: np.ndarray
    r: np.ndarray

    @property
    def steps(self) -> int:
        return len(self.s) - 1

    @property
    def final_size(self) -> int:
        return int(self.i[-1] + self.r[-1])


def epidemic_threshold(g: Graph) -> float:
    """Infection probability <k>/(<k^2>-<k>) above which outbreaks take off."""
    deg = g.degrees.astype(np.float64)
    k1 = deg.mean()
    k2 = (deg * deg).mean()
    if k2 - k1 <= 0.0:
        raise DataError(
            "degenerate degree distribution: <k^2> <= <k>, threshold undefined")
    return k1 / (k2 - k1)


def _seed_array(g: Graph, seeds: Iterable[int]) -> np.ndarray:
    arr = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if arr.size == 0:
        raise UsageError("seed set must be nonempty")
    if arr[0] < 0 or arr[-1] >= g.n:
        raise UsageError("seed id outside [0, n)")
    return arr.astype(np.int32)


def sir_run(g: Graph, seeds: Iterable[int], cfg: SirConfig, seed: int) -> SirOutcome:
    """Simulate one trajectory until no node is infectious (or max_steps)."""
    arr = _seed_array(g, seeds)
    s, i, r = _kernels.sir_single(g.indptr, g.indices, arr,
                                  cfg.beta, cfg.gamma, seed, cfg.max_steps)
    return SirOutcome(s=s, i=i, r=r)


def sir_node_scores(g: Graph, beta: float | None = None, runs: int = 1000,
                    base_seed: int = 0, gamma: float = 1.0,
                    max_steps: int = 10_000) -> np.ndarray:
    """Mean final outbreak size per seeding node over ``runs`` epidemics.

    ``beta`` defaults to the epidemic threshold of the graph.
    """
    if runs < 1:
        raise UsageError("runs must be >= 1")
    if beta is None:
        beta = epidemic_threshold(g)
    SirConfig(beta=beta, gamma=gamma, max_steps=max_steps)  # validate
    return _kernels.sir_final_mean(g.indptr, g.indices, beta, gamma,
                                   runs, base_seed, max_steps)


@dataclass(frozen=True)
class SpreadCurve:
    """Mean I(t)+R(t) over repeated epidemics from a fixed seed set."""

    t: np.ndarray
    f: np.ndarray
    seeds: np.ndarray

    @property
    def steady_state(self) -> float:
        return float(self.f[-1])


def spreading_ability(g: Graph, ranking: RankedList, top_frac: float = 0.05,
                      beta: float | None = None, runs: int = 1000,
                      base_seed: int = 0, gamma: float = 1.0,
                      max_steps: int = 10_000) -> SpreadCurve:
    """Seed the top-ranked ceil(top_frac*n) nodes and average I(t)+R(t)
    over ``runs`` epidemics, each run padded with its terminal value."""
    if not 0.0 < top_frac < 1.0:
        raise UsageError(f"top_frac must be in (0, 1), got {top_frac}")
    if runs < 1:
        raise UsageError("runs must be >= 1")
    if beta is None:
        beta = epidemic_threshold(g)
    SirConfig(beta=beta, gamma=gamma, max_steps=max_steps)  # validate
    k = math.ceil(top_frac * g.n)
    seeds = np.sort(ranking.order[:k]).astype(np.int32)
    f = _kernels.sir_curve(g.indptr, g.indices, seeds, beta, gamma,
                           runs, base_seed, max_steps)
    return SpreadCurve(t=np.arange(len(f), dtype=np.int64), f=f,
                       seeds=seeds.astype(np.int64))


def write_spread_csv(curve: SpreadCurve, fh: TextIO) -> None:
    fh.write("t,F_mean\n")
    for t, f in zip(curve.t, curve.f):
        fh.write(f"{int(t)},{float(f)!r}\n")
