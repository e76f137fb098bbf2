"""Minimal dense numeric engine for the two graph models.

Everything is float64 C-order NumPy. Three layer types (graph convolution,
graph attention, affine) with hand-derived backward passes, mean-squared
loss, and Adam. No autodiff: each layer caches what its own gradient
needs during forward.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UsageError
from .graphs import Graph, adjacency_csr
from .rng import Stream

_LEAKY_SLOPE = 0.2


def glorot_uniform(fan_in: int, fan_out: int, shape: tuple[int, ...],
                   stream: Stream) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    size = int(np.prod(shape))
    return ((stream.doubles(size) * 2.0 - 1.0) * limit).reshape(shape)


def _activate(name: str, x: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(x, 0.0)
    if name == "elu":
        return np.where(x > 0.0, x, np.expm1(x))
    if name == "identity":
        return x
    raise UsageError(f"unknown activation {name!r}")


def _activate_grad(name: str, pre: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (pre > 0.0).astype(np.float64)
    if name == "elu":
        return np.where(pre > 0.0, 1.0, np.exp(pre))
    if name == "identity":
        return np.ones_like(pre)
    raise UsageError(f"unknown activation {name!r}")


def normalized_adjacency(g: Graph):
    """Symmetrically renormalized adjacency with self-loops,
    D^{-1/2} (A+I) D^{-1/2}, as a scipy CSR matrix."""
    from scipy import sparse

    a = adjacency_csr(g) + sparse.identity(g.n, format="csr")
    dinv = 1.0 / np.sqrt(np.asarray(a.sum(axis=1)).ravel())
    d = sparse.diags(dinv)
    return (d @ a @ d).tocsr()


@dataclass(frozen=True)
class GatEdges:
    """Directed (i -> j) attention edges, j in N(i) plus the self-loop,
    grouped contiguously per i and sorted by j within each group."""

    src: np.ndarray
    dst: np.ndarray
    seg_ptr: np.ndarray


def gat_edges(g: Graph) -> GatEdges:
    counts = g.degrees + 1
    seg_ptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=seg_ptr[1:])
    dst = np.empty(seg_ptr[-1], dtype=np.int64)
    for i in range(g.n):
        nbrs = g.neighbors(i)
        pos = int(np.searchsorted(nbrs, i))
        base = seg_ptr[i]
        dst[base:base + pos] = nbrs[:pos]
        dst[base + pos] = i
        dst[base + pos + 1:seg_ptr[i + 1]] = nbrs[pos:]
    src = np.repeat(np.arange(g.n, dtype=np.int64), counts)
    return GatEdges(src=src, dst=dst, seg_ptr=seg_ptr)


class Linear:
    """Affine map y = x w + b."""

    def __init__(self, d_in: int, d_out: int, stream: Stream):
        self.d_in = d_in
        self.d_out = d_out
        self.w = glorot_uniform(d_in, d_out, (d_in, d_out), stream)
        self.b = np.zeros(d_out)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1] != self.d_in:
            raise UsageError(f"linear layer expects {self.d_in} inputs, "
                             f"got {x.shape[1]}")
        self._x = x
        return x @ self.w + self.b

    def backward(self, dy: np.ndarray) -> np.ndarray:
        self.gw = self._x.T @ dy
        self.gb = dy.sum(axis=0)
        return dy @ self.w.T

    def params(self):
        return [("w", self.w), ("b", self.b)]

    def grads(self):
        return [("w", self.gw), ("b", self.gb)]


class GcnLayer:
    """h' = act((S h) w) with S the renormalized adjacency."""

    def __init__(self, d_in: int, d_out: int, activation: str, stream: Stream):
        self.d_in = d_in
        self.d_out = d_out
        self.activation = activation
        self.w = glorot_uniform(d_in, d_out, (d_in, d_out), stream)
        self.gw = np.zeros_like(self.w)
        self._z: np.ndarray | None = None
        self._pre: np.ndarray | None = None

    def forward(self, s, h: np.ndarray) -> np.ndarray:
        if h.shape[1] != self.d_in:
            raise UsageError(f"gcn layer expects {self.d_in} inputs, "
                             f"got {h.shape[1]}")
        z = s @ h
        pre = z @ self.w
        self._z = z
        self._pre = pre
        return _activate(self.activation, pre)

    def backward(self, s, dout: np.ndarray) -> np.ndarray:
        dpre = dout * _activate_grad(self.activation, self._pre)
        self.gw = self._z.T @ dpre
        # S is symmetric, so d(Sh) pulled back through S is another S product
        return s @ (dpre @ self.w.T)

    def params(self):
        return [("w", self.w)]

    def grads(self):
        return [("w", self.gw)]


class GatLayer:
    """Multi-head attention aggregation over neighbors plus self.

    Per head: e_ij = a . [w h_i || w h_j], attention alpha = softmax over
    LeakyReLU(e) within each i's neighborhood, output act(sum alpha w h_j);
    heads are concatenated.
    """

    def __init__(self, d_in: int, d_out: int, heads: int, activation: str,
                 stream: Stream):
        self.d_in = d_in
        self.d_out = d_out
        self.heads = heads
        self.activation = activation
        self.w = [glorot_uniform(d_in, d_out, (d_in, d_out), stream)
                  for _ in range(heads)]
        self.a = [glorot_uniform(2 * d_out, 1, (2 * d_out,), stream)
                  for _ in range(heads)]
        self.gw = [np.zeros_like(w) for w in self.w]
        self.ga = [np.zeros_like(a) for a in self.a]
        self._cache: list[dict] = []
        self._h: np.ndarray | None = None

    def forward(self, eg: GatEdges, h: np.ndarray) -> np.ndarray:
        if h.shape[1] != self.d_in:
            raise UsageError(f"gat layer expects {self.d_in} inputs, "
                             f"got {h.shape[1]}")
        starts = eg.seg_ptr[:-1]
        self._h = h
        self._cache = []
        outs = []
        for k in range(self.heads):
            p = h @ self.w[k]
            s_score = p @ self.a[k][:self.d_out]
            t_score = p @ self.a[k][self.d_out:]
            e = s_score[eg.src] + t_score[eg.dst]
            lrelu = np.where(e > 0.0, e, _LEAKY_SLOPE * e)
            shift = np.maximum.reduceat(lrelu, starts)
            ex = np.exp(lrelu - shift[eg.src])
            denom = np.add.reduceat(ex, starts)
            alpha = ex / denom[eg.src]
            msg = np.add.reduceat(alpha[:, None] * p[eg.dst], starts, axis=0)
            outs.append(_activate(self.activation, msg))
            self._cache.append({"p": p, "e": e, "alpha": alpha, "msg": msg})
        return np.concatenate(outs, axis=1) if self.heads > 1 else outs[0]

    def attention(self, eg: GatEdges, h: np.ndarray) -> list[np.ndarray]:
        """Per-head attention coefficients of a fresh forward pass."""
        self.forward(eg, h)
        return [c["alpha"] for c in self._cache]

    def backward(self, eg: GatEdges, dout: np.ndarray) -> np.ndarray:
        h = self._h
        n = h.shape[0]
        starts = eg.seg_ptr[:-1]
        dh = np.zeros_like(h)
        for k in range(self.heads):
            c = self._cache[k]
            p, e, alpha = c["p"], c["e"], c["alpha"]
            gk = dout[:, k * self.d_out:(k + 1) * self.d_out]
            dmsg = gk * _activate_grad(self.activation, c["msg"])
            dalpha = (dmsg[eg.src] * p[eg.dst]).sum(axis=1)
            dp = np.zeros_like(p)
            np.add.at(dp, eg.dst, alpha[:, None] * dmsg[eg.src])
            seg_dot = np.add.reduceat(alpha * dalpha, starts)
            dl = alpha * (dalpha - seg_dot[eg.src])
            de = dl * np.where(e > 0.0, 1.0, _LEAKY_SLOPE)
            ds = np.add.reduceat(de, starts)
            dt = np.zeros(n)
            np.add.at(dt, eg.dst, de)
            self.ga[k] = np.concatenate([p.T @ ds, p.T @ dt])
            dp += ds[:, None] * self.a[k][None, :self.d_out]
            dp += dt[:, None] * self.a[k][None, self.d_out:]
            self.gw[k] = h.T @ dp
            dh += dp @ self.w[k].T
        return dh

    def params(self):
        out = []
        for k in range(self.heads):
            out.append((f"h{k}.w", self.w[k]))
            out.append((f"h{k}.a", self.a[k]))
        return out

    def grads(self):
        out = []
        for k in range(self.heads):
            out.append((f"h{k}.w", self.gw[k]))
            out.append((f"h{k}.a", self.ga[k]))
        return out


def mse(pred: np.ndarray, target: np.ndarray) -> float:
    diff = pred - target
    return float((diff * diff).mean())


def mse_grad(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    return 2.0 * (pred - target) / pred.size


class GcnRegressor:
    """Stacked graph convolutions and a scalar affine head; the last
    convolution's activations double as the extracted node features."""

    def __init__(self, in_dim: int, layer_dims: list[int], seed_stream: Stream,
                 activation: str = "relu"):
        self.arch = {"kind": "gcn", "in_dim": in_dim,
                     "layer_dims": list(layer_dims), "activation": activation}
        self.layers: list[GcnLayer] = []
        prev = in_dim
        for d in layer_dims:
            self.layers.append(GcnLayer(prev, d, activation, seed_stream))
            prev = d
        self.head = Linear(prev, 1, seed_stream)

    def features(self, s, h0: np.ndarray) -> np.ndarray:
        h = h0
        for layer in self.layers:
            h = layer.forward(s, h)
        return h

    def forward(self, s, h0: np.ndarray) -> np.ndarray:
        return self.head.forward(self.features(s, h0))

    def backward(self, s, dy: np.ndarray) -> None:
        dh = self.head.backward(dy)
        for layer in reversed(self.layers):
            dh = layer.backward(s, dh)

    def parameters(self):
        out = []
        for i, layer in enumerate(self.layers):
            out.extend((f"gcn{i}.{n}", p) for n, p in layer.params())
        out.extend((f"head.{n}", p) for n, p in self.head.params())
        return out

    def gradients(self):
        out = []
        for i, layer in enumerate(self.layers):
            out.extend((f"gcn{i}.{n}", g) for n, g in layer.grads())
        out.extend((f"head.{n}", g) for n, g in self.head.grads())
        return out


class GatRegressor:
    """Stacked attention layers and a scalar affine head.

    All layers but the last apply the hidden activation and their own head
    count; the last layer is single-activation-free (identity) so the
    affine head sees raw aggregated features.
    """

    def __init__(self, in_dim: int, layer_specs: list[tuple[int, int]],
                 seed_stream: Stream, hidden_activation: str = "elu"):
        self.arch = {"kind": "gat", "in_dim": in_dim,
                     "layer_specs": [list(spec) for spec in layer_specs],
                     "hidden_activation": hidden_activation}
        self.layers: list[GatLayer] = []
        prev = in_dim
        for li, (d_out, heads) in enumerate(layer_specs):
            act = hidden_activation if li < len(layer_specs) - 1 else "identity"
            self.layers.append(GatLayer(prev, d_out, heads, act, seed_stream))
            prev = d_out * heads
        self.head = Linear(prev, 1, seed_stream)

    def forward(self, eg: GatEdges, h: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            h = layer.forward(eg, h)
        return self.head.forward(h)

    def backward(self, eg: GatEdges, dy: np.ndarray) -> None:
        dh = self.head.backward(dy)
        for layer in reversed(self.layers):
            dh = layer.backward(eg, dh)

    def parameters(self):
        out = []
        for i, layer in enumerate(self.layers):
            out.extend((f"gat{i}.{n}", p) for n, p in layer.params())
        out.extend((f"head.{n}", p) for n, p in self.head.params())
        return out

    def gradients(self):
        out = []
        for i, layer in enumerate(self.layers):
            out.extend((f"gat{i}.{n}", g) for n, g in layer.grads())
        out.extend((f"head.{n}", g) for n, g in self.head.grads())
        return out


class Adam:
    """Adam with bias correction; weight decay is folded into the gradient
    before the moment update (g += wd * p)."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 weight_decay: float = 0.0, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.params = params
        self.lr = lr
        self.weight_decay = weight_decay
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, grads: list[np.ndarray]) -> None:
        if len(grads) != len(self.params):
            raise UsageError("gradient list does not match parameter list")
        self.t += 1
        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(self.params, grads, self.m, self.v):
            if self.weight_decay:
                g = g + self.weight_decay * p
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


_CHECKPOINT_FORMAT = "vitalnodes-model"
_CHECKPOINT_VERSION = 1


def save_checkpoint(model, path: str) -> None:
    """JSON checkpoint: architecture plus flat parameter arrays. Floats are
    serialized via repr, so a round trip is bit-exact."""
    payload = {
        "format": _CHECKPOINT_FORMAT,
        "version": _CHECKPOINT_VERSION,
        "arch": model.arch,
        "params": {
            name: {"shape": list(arr.shape), "data": arr.ravel().tolist()}
            for name, arr in model.parameters()
        },
    }
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
    os.replace(tmp, path)


def build_model(arch: dict):
    stream = Stream(0)
    if arch["kind"] == "gcn":
        return GcnRegressor(arch["in_dim"], arch["layer_dims"], stream,
                            activation=arch["activation"])
    if arch["kind"] == "gat":
        specs = [tuple(spec) for spec in arch["layer_specs"]]
        return GatRegressor(arch["in_dim"], specs, stream,
                            hidden_activation=arch["hidden_activation"])
    raise DataError(f"unknown model kind {arch['kind']!r}")


def load_checkpoint(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read checkpoint {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"checkpoint {path!r} is not valid JSON: {exc}") from exc
    if payload.get("format") != _CHECKPOINT_FORMAT:
        raise DataError(f"{path!r} is not a model checkpoint")
    if payload.get("version") != _CHECKPOINT_VERSION:
        raise DataError(f"unsupported checkpoint version {payload.get('version')}")
    model = build_model(payload["arch"])
    stored = payload["params"]
    for name, arr in model.parameters():
        if name not in stored:
            raise DataError(f"checkpoint missing parameter {name!r}")
        entry = stored[name]
        values = np.asarray(entry["data"], dtype=np.float64)
        arr[...] = values.reshape(entry["shape"])
    return model
