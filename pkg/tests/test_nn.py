import numpy as np
import pytest

from conftest import complete_graph, line_graph, random_graph

from vitalnodes import nn
from vitalnodes.errors import UsageError
from vitalnodes.graphs import Graph
from vitalnodes.rng import Stream


def gradcheck(model, forward, target, h=1e-5, tol=1e-4):
    """Central finite differences against the analytic gradients for every
    parameter entry; returns the worst relative error."""

    def loss():
        return nn.mse(forward().ravel(), target)

    pred = forward().ravel()
    model.backward_last(nn.mse_grad(pred, target).reshape(-1, 1))
    analytic = {name: g.copy() for name, g in model.gradients()}
    worst = 0.0
    for name, param in model.parameters():
        flat = param.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss()
            flat[i] = orig - h
            down = loss()
            flat[i] = orig
            fd = (up - down) / (2 * h)
            an = analytic[name].reshape(-1)[i]
            err = abs(an - fd) / max(abs(an), abs(fd), 1.0)
            assert err < tol, f"{name}[{i}]: analytic {an} vs fd {fd} (err {err})"
            worst = max(worst, err)
    return worst


class _GcnHarness:
    def __init__(self, model, s, h0):
        self.model = model
        self.s = s
        self.h0 = h0

    def forward(self):
        return self.model.forward(self.s, self.h0)

    def backward_last(self, dy):
        self.model.backward(self.s, dy)

    def parameters(self):
        return self.model.parameters()

    def gradients(self):
        return self.model.gradients()


class _GatHarness:
    def __init__(self, model, eg, h):
        self.model = model
        self.eg = eg
        self.h = h

    def forward(self):
        return self.model.forward(self.eg, self.h)

    def backward_last(self, dy):
        self.model.backward(self.eg, dy)

    def parameters(self):
        return self.model.parameters()

    def gradients(self):
        return self.model.gradients()


class TestPrimitives:
    def test_linear_forward_examples(self):
        layer = nn.Linear(1, 1, Stream(0))
        layer.w[...] = [[2.0]]
        layer.b[...] = [1.0]
        assert layer.forward(np.array([[3.0]]))[0, 0] == 7.0
        layer.w[...] = [[1.0]]
        layer.b[...] = [0.0]
        x = np.array([[5.0], [-2.0]])
        assert np.array_equal(layer.forward(x), x)
        layer.b[...] = [4.0]
        assert np.all(layer.forward(np.zeros((3, 1))) == 4.0)

    def test_mse_examples(self):
        assert nn.mse(np.array([1.0, 2.0]), np.array([1.0, 2.0])) == 0.0
        assert nn.mse(np.array([2.0, 3.0]), np.array([1.0, 2.0])) == 1.0
        assert nn.mse(np.array([1.0, 3.0]), np.array([0.0, 0.0])) == 5.0

    def test_mse_zero_loss_zero_grad(self):
        pred = np.array([1.0, 2.0, 3.0])
        assert np.all(nn.mse_grad(pred, pred) == 0.0)

    def test_normalized_adjacency_single_node(self):
        s = nn.normalized_adjacency(Graph.from_edges(1, []))
        assert s.toarray().tolist() == [[1.0]]

    def test_normalized_adjacency_p2(self):
        s = nn.normalized_adjacency(line_graph(2)).toarray()
        assert np.allclose(s, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)

    def test_propagation_matrix_symmetric_spectral_radius_at_most_one(self):
        for seed in range(4):
            g = random_graph(12, 0.3, seed)
            s = nn.normalized_adjacency(g).toarray()
            assert np.allclose(s, s.T, atol=1e-15)
            eigs = np.linalg.eigvalsh(s)
            assert eigs.max() <= 1.0 + 1e-12
            assert abs(eigs).max() <= 1.0 + 1e-12


class TestGcnLayer:
    def test_identity_weights_on_p2(self):
        g = line_graph(2)
        layer = nn.GcnLayer(2, 2, "identity", Stream(0))
        layer.w[...] = np.eye(2)
        h = np.array([[1.0, 0.0], [0.0, 2.0]])
        out = layer.forward(nn.normalized_adjacency(g), h)
        assert np.allclose(out, [[0.5, 1.0], [0.5, 1.0]], atol=1e-15)

    def test_zero_row_propagation(self):
        # a zero feature row stays zero only if every S-neighbor is zero
        g = Graph.from_edges(3, [(0, 1)])
        layer = nn.GcnLayer(1, 1, "identity", Stream(1))
        layer.w[...] = [[1.0]]
        h = np.array([[0.0], [1.0], [0.0]])
        out = layer.forward(nn.normalized_adjacency(g), h)
        assert out[0, 0] != 0.0   # neighbor of a nonzero row
        assert out[2, 0] == 0.0   # isolated zero row

    def test_shape_mismatch(self):
        layer = nn.GcnLayer(3, 2, "relu", Stream(0))
        with pytest.raises(UsageError):
            layer.forward(nn.normalized_adjacency(line_graph(2)), np.ones((2, 4)))


class TestGatLayer:
    def test_isolated_node_self_attention(self):
        eg = nn.gat_edges(Graph.from_edges(3, [(0, 1)]))
        layer = nn.GatLayer(2, 2, 1, "identity", Stream(3))
        h = np.random.default_rng(0).random((3, 2))
        out = layer.forward(eg, h)
        # node 2 is isolated: output is exactly w h_2 (alpha_22 = 1)
        assert np.allclose(out[2], h[2] @ layer.w[0], atol=1e-12)

    def test_zero_attention_vector_gives_uniform_alpha(self):
        g = complete_graph(4)
        eg = nn.gat_edges(g)
        layer = nn.GatLayer(3, 2, 1, "elu", Stream(5))
        layer.a[0][...] = 0.0
        h = np.random.default_rng(1).random((4, 3))
        alpha = layer.attention(eg, h)[0]
        assert np.allclose(alpha, 0.25, atol=1e-15)

    def test_attention_rows_sum_to_one(self):
        g = random_graph(10, 0.3, 2)
        eg = nn.gat_edges(g)
        layer = nn.GatLayer(4, 3, 2, "elu", Stream(7))
        h = np.random.default_rng(2).random((10, 4))
        for alpha in layer.attention(eg, h):
            sums = np.add.reduceat(alpha, eg.seg_ptr[:-1])
            assert np.allclose(sums, 1.0, atol=1e-12)

    def test_multi_head_concatenates(self):
        g = complete_graph(3)
        layer = nn.GatLayer(2, 4, 3, "elu", Stream(9))
        out = layer.forward(nn.gat_edges(g), np.ones((3, 2)))
        assert out.shape == (3, 12)


class TestGradients:
    def test_gcn_regressor_gradcheck(self):
        g = random_graph(7, 0.4, 0)
        model = nn.GcnRegressor(7, [5, 4], Stream(11))
        h0 = np.random.default_rng(3).standard_normal((7, 7))
        target = np.random.default_rng(4).standard_normal(7)
        harness = _GcnHarness(model, nn.normalized_adjacency(g), h0)
        gradcheck(harness, harness.forward, target)

    def test_gat_regressor_gradcheck(self):
        g = random_graph(6, 0.5, 1)
        model = nn.GatRegressor(4, [(3, 2), (3, 1)], Stream(13))
        h = np.random.default_rng(5).standard_normal((6, 4))
        target = np.random.default_rng(6).standard_normal(6)
        harness = _GatHarness(model, nn.gat_edges(g), h)
        gradcheck(harness, harness.forward, target)

    def test_unused_head_has_zero_grad(self):
        # gradient of a parameter that cannot influence the loss must be 0:
        # mask the head's contribution by zeroing the head weights feeding it
        g = complete_graph(3)
        model = nn.GatRegressor(2, [(2, 2)], Stream(15))
        model.head.w[2:, :] = 0.0  # second head's slice ignored by the head
        h = np.random.default_rng(7).standard_normal((3, 2))
        pred = model.forward(nn.gat_edges(g), h).ravel()
        model.backward(nn.gat_edges(g), nn.mse_grad(pred, np.zeros(3)).reshape(-1, 1))
        grads = dict(model.gradients())
        assert np.allclose(grads["gat0.h1.w"], 0.0, atol=1e-15)
        assert np.allclose(grads["gat0.h1.a"], 0.0, atol=1e-15)


class TestAdam:
    def test_zero_grad_no_decay_leaves_params(self):
        p = np.array([1.0, -2.0])
        adam = nn.Adam([p], lr=0.1, weight_decay=0.0)
        adam.step([np.zeros(2)])
        assert np.array_equal(p, [1.0, -2.0])

    def test_first_step_magnitude_is_lr_sign(self):
        p = np.array([0.5])
        adam = nn.Adam([p], lr=0.01, weight_decay=0.0)
        adam.step([np.array([3.0])])
        # bias-corrected first step: lr * g / (|g| + eps') ~ lr * sign(g)
        assert p[0] == pytest.approx(0.5 - 0.01, rel=1e-6)

    def test_weight_decay_drifts_toward_zero(self):
        p = np.array([1.0])
        adam = nn.Adam([p], lr=0.1, weight_decay=0.1)
        adam.step([np.zeros(1)])
        assert p[0] < 1.0

    def test_deterministic(self):
        p1 = np.array([1.0, 2.0])
        p2 = p1.copy()
        g = np.array([0.3, -0.7])
        a1 = nn.Adam([p1], lr=0.05, weight_decay=0.01)
        a2 = nn.Adam([p2], lr=0.05, weight_decay=0.01)
        for _ in range(10):
            a1.step([g])
            a2.step([g])
        assert np.array_equal(p1, p2)


class TestCheckpoints:
    def test_round_trip_bit_exact(self, tmp_path):
        model = nn.GatRegressor(5, [(4, 2), (4, 1)], Stream(21))
        path = str(tmp_path / "model.json")
        nn.save_checkpoint(model, path)
        loaded = nn.load_checkpoint(path)
        for (name, a), (name2, b) in zip(model.parameters(), loaded.parameters()):
            assert name == name2
            assert np.array_equal(a, b)
        assert loaded.arch == model.arch

    def test_gcn_round_trip(self, tmp_path):
        model = nn.GcnRegressor(6, [4, 3], Stream(23))
        path = str(tmp_path / "gcn.json")
        nn.save_checkpoint(model, path)
        loaded = nn.load_checkpoint(path)
        g = random_graph(6, 0.5, 3)
        h0 = np.random.default_rng(9).standard_normal((6, 6))
        s = nn.normalized_adjacency(g)
        assert np.array_equal(model.forward(s, h0), loaded.forward(s, h0))

    def test_rejects_non_checkpoint(self, tmp_path):
        from vitalnodes.errors import DataError

        bad = tmp_path / "bad.json"
        bad.write_text('{"hello": 1}')
        with pytest.raises(DataError):
            nn.load_checkpoint(str(bad))
