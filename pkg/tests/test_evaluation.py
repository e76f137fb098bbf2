import numpy as np
import pytest

import oracles
from conftest import complete_graph, graph_from_adj, line_graph, random_graph

from vitalnodes import evaluation as ev
from vitalnodes.centrality import degree_centrality, random_ranking
from vitalnodes.errors import UsageError
from vitalnodes.graphs import Graph, generate_ba, remove_nodes


class TestLccCurve:
    def test_endpoints(self):
        g = generate_ba(100, 2, seed=1)
        curve = ev.lcc_curve(g, degree_centrality(g), 0.02)
        assert curve.values[0] == 1.0
        assert curve.r[0] == 0.0
        assert curve.values[-1] == 0.0
        assert curve.r[-1] == 1.0

    def test_non_increasing_for_any_ranking(self):
        g = generate_ba(120, 2, seed=2)
        for seed in range(3):
            curve = ev.lcc_curve(g, random_ranking(g, seed), 0.05)
            assert np.all(np.diff(curve.values) <= 1e-15)

    def test_degree_attack_beats_random(self):
        g = generate_ba(500, 2, seed=3)
        deg = ev.lcc_curve(g, degree_centrality(g), 0.02)
        rnd_vals = np.mean([ev.lcc_curve(g, random_ranking(g, s), 0.02).values
                            for s in range(5)], axis=0)
        at = np.flatnonzero(np.isclose(deg.r, 0.2))[0]
        assert deg.values[at] <= rnd_vals[at]

    def test_matches_explicit_removal(self):
        g = random_graph(40, 0.15, 4)
        ranking = degree_centrality(g)
        curve = ev.lcc_curve(g, ranking, 1.0 / g.n)
        for k in (0, 5, 17, 33, 40):
            survivors = remove_nodes(g, ranking.order[:k].tolist())
            adj = [survivors.neighbors(v).tolist() if survivors.alive[v] else []
                   for v in range(g.n)]
            alive_adj = [adj[v] for v in range(g.n)]
            expected = 0
            # count components among alive nodes only
            seen = [not survivors.alive[v] for v in range(g.n)]
            for s in range(g.n):
                if seen[s]:
                    continue
                stack, size = [s], 0
                seen[s] = True
                while stack:
                    u = stack.pop()
                    size += 1
                    for w in alive_adj[u]:
                        if not seen[w]:
                            seen[w] = True
                            stack.append(w)
                expected = max(expected, size)
            assert curve.values[k] == expected / g.n

    def test_step_validation(self):
        g = complete_graph(5)
        with pytest.raises(UsageError):
            ev.lcc_curve(g, degree_centrality(g), 0.7)


class TestEfficiency:
    def test_complete_graph_is_one(self):
        assert ev.efficiency(complete_graph(7)) == 1.0

    def test_path_three(self):
        assert ev.efficiency(line_graph(3)) == pytest.approx(5 / 6, abs=1e-15)

    def test_edgeless_zero(self):
        assert ev.efficiency(Graph.from_edges(4, [])) == 0.0

    def test_in_unit_interval_and_one_iff_complete(self):
        for seed in range(5):
            g = random_graph(12, 0.4, seed)
            mu = ev.efficiency(g)
            assert 0.0 <= mu <= 1.0
            complete = g.m == g.n * (g.n - 1) // 2
            assert (mu == 1.0) == complete

    def test_matches_brute_force(self, graph_classes_small):
        for n, reps in graph_classes_small.items():
            for adj in reps:
                g = graph_from_adj(adj)
                assert ev.efficiency(g) == pytest.approx(
                    oracles.efficiency(adj), abs=1e-12)

    def test_respects_alive_mask(self):
        g = line_graph(4)
        reduced = remove_nodes(g, [3])
        assert ev.efficiency(reduced) == pytest.approx(
            oracles.efficiency([[1], [0, 2], [1], []][:3]), abs=1e-15)


class TestEfficiencyCurve:
    def test_starts_at_intact_efficiency(self):
        g = generate_ba(60, 2, seed=5)
        curve = ev.efficiency_curve(g, degree_centrality(g), 0.1)
        assert curve.values[0] == pytest.approx(ev.efficiency(g), abs=1e-15)
        assert np.all(curve.values >= 0.0)

    def test_complete_graph_closed_form(self):
        # removing k nodes from K_n leaves K_{n-k}: efficiency 1 until only
        # one node is left, then 0
        n = 8
        g = complete_graph(n)
        curve = ev.efficiency_curve(g, degree_centrality(g), 1.0 / n)
        for k, val in zip(range(n + 1), curve.values):
            assert val == (1.0 if n - k >= 2 else 0.0)

    def test_early_stop_truncates(self):
        g = generate_ba(80, 2, seed=6)
        full = ev.efficiency_curve(g, degree_centrality(g), 1.0 / g.n)
        target = 0.5 * full.values[0]
        stopped = ev.efficiency_curve(g, degree_centrality(g), 1.0 / g.n,
                                      stop_below=target)
        assert len(stopped.values) <= len(full.values)
        assert stopped.values[-1] <= target
        assert np.array_equal(stopped.values,
                              full.values[:len(stopped.values)])


class TestRemovalRatioAt:
    def test_exact_hit(self):
        curve = ev.AttackCurve(r=np.array([0.0, 0.1, 0.2, 0.3]),
                               values=np.array([1.0, 0.5, 0.2, 0.01]),
                               method="x", metric="lcc")
        hit = ev.removal_ratio_at(curve, 0.01)
        assert hit.ratio == 0.3 and hit.reached

    def test_never_reached_flagged(self):
        curve = ev.AttackCurve(r=np.array([0.0, 0.5, 1.0]),
                               values=np.array([1.0, 0.9, 0.8]),
                               method="x", metric="lcc")
        hit = ev.removal_ratio_at(curve, 0.01)
        assert hit.ratio == 1.0 and not hit.reached

    def test_monotone_in_threshold(self):
        g = generate_ba(150, 2, seed=7)
        curve = ev.lcc_curve(g, degree_centrality(g), 1.0 / g.n)
        ratios = [ev.removal_ratio_at(curve, th).ratio
                  for th in (0.5, 0.2, 0.05, 0.01)]
        assert ratios == sorted(ratios)


class TestLccOracle:
    def test_matches_brute_force_on_small_graphs(self, graph_classes_small):
        from vitalnodes.graphs import largest_component_size

        for n, reps in graph_classes_small.items():
            for adj in reps:
                g = graph_from_adj(adj)
                assert largest_component_size(g) == oracles.largest_component(adj)


class TestCompareMethods:
    def test_report_layout_and_determinism(self):
        g = generate_ba(90, 2, seed=8)
        rankings = {"DC": degree_centrality(g), "RANDOM": random_ranking(g, 1)}
        kwargs = dict(curve_step=0.1, sir_runs=20, base_seed=5)
        a = ev.compare_methods(g, rankings, **kwargs)
        b = ev.compare_methods(g, rankings, **kwargs)
        assert [row.method for row in a.rows] == ["DC", "RANDOM"]
        for ra, rb in zip(a.rows, b.rows):
            assert ra == rb
        for method in rankings:
            assert np.array_equal(a.lcc_curves[method].values,
                                  b.lcc_curves[method].values)
            assert np.array_equal(a.spread_curves[method].f,
                                  b.spread_curves[method].f)

    def test_initial_efficiency_recorded(self):
        g = generate_ba(50, 2, seed=9)
        report = ev.compare_methods(g, {"DC": degree_centrality(g)},
                                    curve_step=0.25, sir_runs=5)
        assert report.initial_efficiency == pytest.approx(ev.efficiency(g))
