"""Attack-and-spreading evaluation of node rankings.

Static targeting throughout: a ranking is computed once on the intact
network and nodes are removed in that fixed order. Two damage metrics are
tracked along the removal schedule (relative largest-component size and
network efficiency over survivors), plus the threshold removal ratios at
which each metric collapses, and SIR spreading curves seeded by top-ranked
nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .centrality import RankedList
from .errors import UsageError
from .graphs import Graph
from .sir import SpreadCurve, spreading_ability


@dataclass(frozen=True)
class AttackCurve:
    """Metric values along a removal-ratio grid for one method."""

    r: np.ndarray
    values: np.ndarray
    method: str
    metric: str


def _ratio_grid(n: int, step: float) -> tuple[np.ndarray, np.ndarray]:
    """Removal ratios and the matching integer removal counts.

    Counts are floor(r*n) computed in exact integer arithmetic so grid
    ratios like 0.3 do not suffer float truncation artifacts.
    """
    if not 0.0 < step <= 0.5:
        raise UsageError(f"step must be in (0, 0.5], got {step}")
    n_points = int(math.floor(1.0 / step + 1e-9)) + 1
    ratios = np.array([i * step for i in range(n_points)])
    if ratios[-1] < 1.0 - 1e-12:
        ratios = np.append(ratios, 1.0)
    counts = np.minimum((ratios * n + 1e-9).astype(np.int64), n)
    return ratios, counts


def lcc_sizes_after_removals(g: Graph, order: np.ndarray) -> np.ndarray:
    """Largest-component size after removing the first k nodes of ``order``,
    for every k in 0..n, via reverse union-find (one pass)."""
    n = g.n
    parent = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    present = np.zeros(n, dtype=bool)

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    out = np.zeros(n + 1, dtype=np.int64)
    best = 0
    for k in range(n - 1, -1, -1):
        v = int(order[k])
        present[v] = True
        rv = v
        for u in g.neighbors(v):
            if present[u]:
                ru, rv = find(int(u)), find(rv)
                if ru != rv:
                    if size[ru] < size[rv]:
                        ru, rv = rv, ru
                    parent[rv] = ru
                    size[ru] += size[rv]
                    rv = ru
        best = max(best, int(size[find(v)]))
        out[k] = best
    return out


def lcc_curve(g: Graph, ranking: RankedList, step: float = 0.02) -> AttackCurve:
    """Relative largest-component size after removing the top floor(r*n)
    nodes, normalized by the intact node count."""
    ratios, counts = _ratio_grid(g.n, step)
    sizes = lcc_sizes_after_removals(g, ranking.order)
    return AttackCurve(r=ratios, values=sizes[counts] / g.n,
                       method="", metric="lcc")


def efficiency(g: Graph) -> float:
    """Mean reciprocal distance over ordered pairs of alive nodes;
    unreachable pairs contribute 0. In [0, 1], and 1 exactly iff complete."""
    na = g.n_alive
    if na < 2:
        return 0.0
    _, _, sum_inv = _kernels.distance_stats(g.indptr, g.indices,
                                            g.alive.astype(np.uint8))
    return float(sum_inv.sum() / (na * (na - 1)))


def efficiency_curve(g: Graph, ranking: RankedList, step: float = 0.02,
                     stop_below: float | None = None) -> AttackCurve:
    """Network efficiency along the removal schedule.

    Survivor efficiency uses the surviving population in both the distance
    sums and the pair-count denominator. With ``stop_below`` the scan stops
    at the first grid point at or under the threshold (the curve is
    truncated there), which keeps node-granular threshold scans affordable.
    """
    ratios, counts = _ratio_grid(g.n, step)
    values = []
    base_alive = g.alive.astype(np.uint8)
    for cnt in counts:
        alive = base_alive.copy()
        alive[ranking.order[:cnt]] = 0
        na = int(alive.sum())
        if na < 2:
            val = 0.0
        else:
            _, _, sum_inv = _kernels.distance_stats(g.indptr, g.indices, alive)
            val = float(sum_inv.sum() / (na * (na - 1)))
        values.append(val)
        if stop_below is not None and val <= stop_below:
            break
    k = len(values)
    return AttackCurve(r=ratios[:k], values=np.array(values),
                       method="", metric="efficiency")


@dataclass(frozen=True)
class ThresholdCross:
    """Smallest grid ratio at which a curve reaches a threshold; if the
    curve never does, ratio is 1.0 and ``reached`` is False."""

    ratio: float
    reached: bool


def removal_ratio_at(curve: AttackCurve, threshold: float) -> ThresholdCross:
    hits = np.flatnonzero(curve.values <= threshold)
    if hits.size == 0:
        return ThresholdCross(ratio=1.0, reached=False)
    return ThresholdCross(ratio=float(curve.r[hits[0]]), reached=True)


@dataclass
class MethodResult:
    method: str
    lcc_removal_ratio: float
    lcc_reached: bool
    efficiency_removal_ratio: float
    efficiency_reached: bool
    spread_steady: float


@dataclass
class ComparisonReport:
    """Per-method threshold ratios and steady spread, plus the curves the
    table rows were derived from."""

    rows: list[MethodResult] = field(default_factory=list)
    lcc_curves: dict[str, AttackCurve] = field(default_factory=dict)
    efficiency_curves: dict[str, AttackCurve] = field(default_factory=dict)
    spread_curves: dict[str, SpreadCurve] = field(default_factory=dict)
    initial_efficiency: float = 0.0


def compare_methods(g: Graph, rankings: dict[str, RankedList], *,
                    curve_step: float = 0.02, lcc_threshold: float = 0.01,
                    efficiency_threshold_frac: float = 0.01,
                    sir_runs: int = 1000, top_frac: float = 0.05,
                    beta: float | None = None, base_seed: int = 0,
                    max_steps: int = 10_000) -> ComparisonReport:
    """Evaluate every ranking under both attack metrics and spreading.

    Plotting curves use ``curve_step``; threshold ratios use node-granular
    removal (step 1/n) so the reported ratios resolve single nodes.
    """
    report = ComparisonReport(initial_efficiency=efficiency(g))
    eff_target = efficiency_threshold_frac * report.initial_efficiency
    node_step = 1.0 / g.n
    for method, ranking in rankings.items():
        lcc_plot = lcc_curve(g, ranking, curve_step)
        lcc_fine = lcc_curve(g, ranking, node_step)
        eff_plot = efficiency_curve(g, ranking, curve_step)
        eff_fine = efficiency_curve(g, ranking, node_step,
                                    stop_below=eff_target)
        spread = spreading_ability(g, ranking, top_frac=top_frac, beta=beta,
                                   runs=sir_runs, base_seed=base_seed,
                                   max_steps=max_steps)
        lcc_hit = removal_ratio_at(lcc_fine, lcc_threshold)
        eff_hit = removal_ratio_at(eff_fine, eff_target)
        report.rows.append(MethodResult(
            method=method,
            lcc_removal_ratio=lcc_hit.ratio,
            lcc_reached=lcc_hit.reached,
            efficiency_removal_ratio=eff_hit.ratio,
            efficiency_reached=eff_hit.reached,
            spread_steady=spread.steady_state,
        ))
        report.lcc_curves[method] = AttackCurve(
            r=lcc_plot.r, values=lcc_plot.values, method=method, metric="lcc")
        report.efficiency_curves[method] = AttackCurve(
            r=eff_plot.r, values=eff_plot.values, method=method,
            metric="efficiency")
        report.spread_curves[method] = spread
    return report
