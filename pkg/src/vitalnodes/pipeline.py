"""GNNE training and ranking.

Flow: a per-network GCN is fitted against node degrees (Laplacian rows in,
64-dim features out), a GAT regressor is fitted once on a synthetic
scale-free network against SIR outbreak sizes, and every node of a test
network is scored by the entropy of its inferred influence factor over its
neighborhood. The GAT transfers across networks because its input width is
the feature dimension, not the node count; the GCN is retrained per network
(its input width is n) but needs only degrees as labels, so no epidemic
simulation happens outside the training network.

The plain GCN/GAT ranking baselines live here too: same trainer, random-walk
embeddings as input features, raw model output as the score.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .centrality import RankedList
from .errors import DataError, NumericError, UsageError
from .graphs import Graph, laplacian
from .nn import (Adam, GatRegressor, GcnRegressor, gat_edges, mse, mse_grad,
                 normalized_adjacency)
from .rng import Stream, derive_seed

_FEATURE_TAG = 0xFEA7
_TASK_TAG = 0x7A5C
_BASELINE_GCN_TAG = 0x6C17
_BASELINE_GAT_TAG = 0x6A73


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of both training stages.

    ``gcn_layers``/``gat_layers``/``feature_dim``/``gat_heads`` span the
    sensitivity-sweep grid; the defaults are the reference setting.
    """

    lr: float = 1e-3
    weight_decay: float = 5e-4
    epochs_feature: int = 500
    epochs_task: int = 2000
    gcn_hidden: int = 16
    feature_dim: int = 64
    gat_hidden: int = 16
    gat_heads: int = 2
    gcn_layers: int = 2
    gat_layers: int = 2
    seed: int = 0

    def __post_init__(self):
        if min(self.epochs_feature, self.epochs_task) < 1:
            raise UsageError("epoch counts must be positive")
        if min(self.gcn_layers, self.gat_layers) < 1:
            raise UsageError("layer counts must be positive")
        if min(self.gcn_hidden, self.feature_dim, self.gat_hidden,
               self.gat_heads) < 1:
            raise UsageError("dimensions and head counts must be positive")

    def gcn_layer_dims(self) -> list[int]:
        return [self.gcn_hidden] * (self.gcn_layers - 1) + [self.feature_dim]

    def gat_layer_specs(self) -> list[tuple[int, int]]:
        specs = [(self.gat_hidden, self.gat_heads)] * (self.gat_layers - 1)
        specs.append((self.gat_hidden, 1 if self.gat_layers > 1 else self.gat_heads))
        return specs

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)


def _fit(model, forward, labels: np.ndarray, epochs: int, lr: float,
         weight_decay: float, what: str) -> np.ndarray:
    params = [p for _, p in model.parameters()]
    adam = Adam(params, lr=lr, weight_decay=weight_decay)
    losses = np.empty(epochs)
    for epoch in range(epochs):
        pred = forward().ravel()
        loss = mse(pred, labels)
        if not np.isfinite(loss):
            raise NumericError(
                f"{what}: non-finite loss at epoch {epoch + 1}/{epochs}; "
                f"last finite loss "
                f"{losses[epoch - 1] if epoch else float('nan')}")
        losses[epoch] = loss
        model.backward_last(mse_grad(pred, labels).reshape(-1, 1))
        adam.step([g for _, g in model.gradients()])
    return losses


class _GcnTask:
    """Binds a GCN regressor to one graph's propagation matrix."""

    def __init__(self, model: GcnRegressor, s, h0: np.ndarray):
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


class _GatTask:
    def __init__(self, model: GatRegressor, eg, h: np.ndarray):
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


@dataclass
class FeatureExtraction:
    """Trained per-network feature extractor and its extracted features."""

    features: np.ndarray
    model: GcnRegressor
    losses: np.ndarray


def train_feature_extractor(g: Graph, cfg: TrainConfig) -> FeatureExtraction:
    """Fit the GCN against raw node degrees; features are the activations
    of the last convolution after the final epoch."""
    if g.n == 0:
        raise DataError("cannot train a feature extractor on an empty graph")
    s = normalized_adjacency(g)
    h0 = laplacian(g)
    model = GcnRegressor(g.n, cfg.gcn_layer_dims(),
                         Stream(derive_seed(cfg.seed, _FEATURE_TAG)))
    labels = g.degrees.astype(np.float64)
    task = _GcnTask(model, s, h0)
    losses = _fit(task, task.forward, labels, cfg.epochs_feature,
                  cfg.lr, cfg.weight_decay, "feature extractor")
    return FeatureExtraction(features=model.features(s, h0), model=model,
                             losses=losses)


@dataclass
class TaskModel:
    """The transferable influence-factor regressor."""

    model: GatRegressor
    losses: np.ndarray


def train_task_model(g_train: Graph, features_train: np.ndarray,
                     labels: np.ndarray, cfg: TrainConfig) -> TaskModel:
    """Fit the GAT against per-node epidemic scores on the training network.

    Labels are divided by the node count so the loss scale does not depend
    on the network size; the ranking a trained model induces is unaffected.
    """
    if features_train.shape != (g_train.n, cfg.feature_dim):
        raise UsageError(
            f"features must be (n, {cfg.feature_dim}), got {features_train.shape}")
    if len(labels) != g_train.n:
        raise UsageError("one label per node required")
    eg = gat_edges(g_train)
    model = GatRegressor(cfg.feature_dim, cfg.gat_layer_specs(),
                         Stream(derive_seed(cfg.seed, _TASK_TAG)))
    task = _GatTask(model, eg, features_train)
    losses = _fit(task, task.forward,
                  np.asarray(labels, dtype=np.float64) / g_train.n,
                  cfg.epochs_task, cfg.lr, cfg.weight_decay, "task model")
    return TaskModel(model=model, losses=losses)


def infer_influence(g: Graph, features: np.ndarray,
                    task: GatRegressor) -> np.ndarray:
    """One forward pass of the task model; scalar influence per node."""
    y = task.forward(gat_edges(g), features).ravel()
    if not np.all(np.isfinite(y)):
        raise NumericError("influence inference produced non-finite values")
    return y


def rescale_positive(y: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Monotone affine map of scores onto [eps, 1], making them usable as
    probabilities; a constant vector maps to all ones."""
    y = np.asarray(y, dtype=np.float64)
    span = float(y.max() - y.min())
    if span == 0.0:
        return np.ones_like(y)
    return eps + (1.0 - eps) * (y - y.min()) / span


def entropy_scores(g: Graph, y: np.ndarray) -> np.ndarray:
    """Neighborhood selection entropy of positive influence factors.

    E_i sums -p log2 p over i's neighbors j, where p = y_i / (sum of y over
    j's neighbors). Isolated nodes score 0. A node whose every neighbor has
    it as the sole neighbor also scores 0 (each p is then exactly 1), e.g.
    the hub of a two-leaf star; that is a property of the formula itself.
    """
    y = np.asarray(y, dtype=np.float64)
    if len(y) != g.n:
        raise UsageError("one influence factor per node required")
    if np.any(y <= 0.0) or not np.all(np.isfinite(y)):
        raise UsageError("influence factors must be strictly positive and "
                         "finite; apply rescale_positive first")
    src = np.repeat(np.arange(g.n), g.degrees)
    dst = g.indices.astype(np.int64)
    neighbor_mass = np.bincount(src, weights=y[dst], minlength=g.n)
    ratio = y[src] / neighbor_mass[dst]
    contrib = -ratio * np.log2(ratio)
    return np.abs(np.bincount(src, weights=contrib, minlength=g.n))


def rank_gnne(g: Graph, features: np.ndarray, task: GatRegressor) -> RankedList:
    """Influence inference, positivity rescale, entropy, rank."""
    y = infer_influence(g, features, task)
    return RankedList.from_scores(entropy_scores(g, rescale_positive(y)))


def gnne_rank_for_graph(g: Graph, task: GatRegressor,
                        cfg: TrainConfig) -> tuple[RankedList, FeatureExtraction]:
    """Full test-time path for one network: retrain the feature extractor
    (degree labels only), then rank by influence entropy."""
    extraction = train_feature_extractor(g, cfg)
    return rank_gnne(g, extraction.features, task), extraction


def train_output_regressor(kind: str, g: Graph, x: np.ndarray,
                           labels: np.ndarray, cfg: TrainConfig):
    """Baseline trainer: fit a plain GCN or GAT regressor on arbitrary
    input features; returns (model, losses)."""
    labels = np.asarray(labels, dtype=np.float64) / g.n
    if kind == "gcn":
        model = GcnRegressor(x.shape[1], cfg.gcn_layer_dims(),
                             Stream(derive_seed(cfg.seed, _BASELINE_GCN_TAG)))
        task = _GcnTask(model, normalized_adjacency(g), x)
    elif kind == "gat":
        model = GatRegressor(x.shape[1], cfg.gat_layer_specs(),
                             Stream(derive_seed(cfg.seed, _BASELINE_GAT_TAG)))
        task = _GatTask(model, gat_edges(g), x)
    else:
        raise UsageError(f"unknown baseline kind {kind!r}")
    losses = _fit(task, task.forward, labels, cfg.epochs_task,
                  cfg.lr, cfg.weight_decay, f"{kind} baseline")
    return model, losses


def model_output_scores(g: Graph, x: np.ndarray, model) -> np.ndarray:
    if isinstance(model, GcnRegressor):
        y = model.forward(normalized_adjacency(g), x).ravel()
    elif isinstance(model, GatRegressor):
        y = model.forward(gat_edges(g), x).ravel()
    else:
        raise UsageError(f"unsupported model type {type(model).__name__}")
    if not np.all(np.isfinite(y)):
        raise NumericError("baseline inference produced non-finite values")
    return y


def rank_by_output(g: Graph, x: np.ndarray, model) -> RankedList:
    """Rank by the raw regressor output (the plain GCN/GAT baselines)."""
    return RankedList.from_scores(model_output_scores(g, x, model))
