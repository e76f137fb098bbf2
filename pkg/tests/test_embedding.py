import numpy as np
import pytest

from conftest import complete_graph, line_graph

from vitalnodes import embedding as emb
from vitalnodes.errors import DataError, UsageError
from vitalnodes.graphs import Graph, NodeMap, generate_ba


def two_cliques(k: int) -> Graph:
    """Two k-cliques joined by a single bridge edge."""
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    pairs += [(k + i, k + j) for i in range(k) for j in range(i + 1, k)]
    pairs.append((0, k))
    return Graph.from_edges(2 * k, pairs)


class TestRandomWalks:
    def test_single_edge_alternates(self):
        corpus = emb.random_walks(line_graph(2), walks_per_node=1,
                                  walk_length=5, seed=0)
        for walk in corpus.walks:
            assert len(walk) == 5
            assert all(walk[i] != walk[i + 1] for i in range(4))

    def test_every_step_is_an_edge(self):
        g = generate_ba(50, 2, seed=1)
        corpus = emb.random_walks(g, walks_per_node=3, walk_length=12, seed=2)
        assert len(corpus.walks) == 150
        for walk in corpus.walks:
            for a, b in zip(walk, walk[1:]):
                assert b in g.neighbors(int(a))

    def test_isolated_node_walk_of_length_one(self):
        g = Graph.from_edges(3, [(0, 1)])
        corpus = emb.random_walks(g, walks_per_node=1, walk_length=6, seed=0)
        lengths = {int(w[0]): len(w) for w in corpus.walks}
        assert lengths[2] == 1

    def test_same_seed_identical_corpus(self):
        g = generate_ba(30, 2, seed=5)
        a = emb.random_walks(g, 2, 10, seed=9)
        b = emb.random_walks(g, 2, 10, seed=9)
        assert len(a.walks) == len(b.walks)
        assert all(np.array_equal(x, y) for x, y in zip(a.walks, b.walks))

    def test_different_seed_differs(self):
        g = generate_ba(30, 2, seed=5)
        a = emb.random_walks(g, 2, 10, seed=1)
        b = emb.random_walks(g, 2, 10, seed=2)
        assert any(not np.array_equal(x, y) for x, y in zip(a.walks, b.walks))

    def test_validation(self):
        with pytest.raises(UsageError):
            emb.random_walks(line_graph(2), walk_length=1)
        with pytest.raises(DataError):
            emb.random_walks(Graph.from_edges(3, []))


class TestSkipGram:
    def test_cliques_separate_in_embedding_space(self):
        g = two_cliques(8)
        table = emb.embed_graph(g, dim=16, walks_per_node=8, walk_length=20,
                                window=4, epochs=4, seed=3)
        vec = table.vectors
        left, right = vec[:8], vec[8:]

        def mean_pair_dist(a, b):
            return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2).mean()

        intra = 0.5 * (mean_pair_dist(left, left) + mean_pair_dist(right, right))
        inter = mean_pair_dist(left, right)
        assert intra < inter

    def test_loss_decreases(self):
        g = generate_ba(40, 2, seed=7)
        table = emb.embed_graph(g, dim=16, walks_per_node=4, walk_length=15,
                                epochs=5, seed=1)
        assert table.epoch_loss[-1] < table.epoch_loss[0]

    def test_same_seed_identical_table(self):
        g = generate_ba(25, 2, seed=2)
        a = emb.embed_graph(g, dim=8, walks_per_node=2, walk_length=10,
                            epochs=2, seed=4)
        b = emb.embed_graph(g, dim=8, walks_per_node=2, walk_length=10,
                            epochs=2, seed=4)
        assert np.array_equal(a.vectors, b.vectors)

    def test_finite_entries(self):
        g = generate_ba(30, 2, seed=3)
        table = emb.embed_graph(g, dim=12, walks_per_node=3, walk_length=12,
                                epochs=3, seed=5)
        assert np.isfinite(table.vectors).all()

    def test_dim_validation(self):
        g = complete_graph(4)
        corpus = emb.random_walks(g, 1, 5, seed=0)
        with pytest.raises(UsageError):
            emb.train_skip_gram(g, corpus, dim=1)


class TestEmbeddingCsv:
    def test_round_trip(self):
        import io

        g = complete_graph(5)
        table = emb.embed_graph(g, dim=6, walks_per_node=2, walk_length=8,
                                epochs=2, seed=1)
        nm = NodeMap.identity(5)
        buf = io.StringIO()
        emb.write_embedding_csv(table, nm, buf)
        buf.seek(0)
        loaded = emb.read_embedding_csv(buf, nm)
        assert np.array_equal(loaded, table.vectors)
