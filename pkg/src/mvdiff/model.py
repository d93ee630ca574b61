"""Consensus graph learning by gradient descent on a view-shared matrix.

Each view's normalized graph P drives a diffusion-style layer H = P W P^T
with a single parameter matrix W shared by all views. The per-view outputs
are renormalized, fused with a weighted self-loop into a consensus graph H,
and trained to a stationary state by minimizing

    sum_v Tr(H^T (I - Phat_v) H) + mu * sum_v Tr(H_v^T H_v)

with plain projected gradient descent (W clipped to nonnegative and
symmetrized after every step). The gradient is derived by hand, chain rule
through the degree normalization included, and is checked against finite
differences in the test suite.
"""

import time
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from . import clustering, graphs
from .exceptions import (
    DimensionMismatch,
    EmptyViewList,
    NonFiniteGradient,
    NonFiniteLoss,
    ViewRowMismatch,
)
from .graphs import DEGREE_EPS, TransitionGraph, sym_normalize


@dataclass
class TrainConfig:
    """Hyperparameters of the consensus-graph trainer.

    alpha weighs the fused view sum against the identity self-loop; mu weighs
    the l2 penalty on the per-view outputs. layers > 1 stacks extra
    H <- H W_l H^T layers, each with its own parameter matrix. cross_view
    pairs each view with its successor in the first layer instead of using
    the same view on both sides.
    """

    alpha: float = 0.5
    mu: float = 1.0
    learning_rate: float = 1e-4
    max_epochs: int = 1000
    patience: int = 10
    seed: int = 42
    layers: int = 1
    cross_view: bool = False
    convergence_tol: float = 1e-8
    stop_on_cliff: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.max_epochs < 0:
            raise ValueError(f"max_epochs must be >= 0, got {self.max_epochs}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")
        if self.layers < 1:
            raise ValueError(f"layers must be >= 1, got {self.layers}")
        if self.convergence_tol <= 0:
            raise ValueError(f"convergence_tol must be > 0, got {self.convergence_tol}")


@dataclass
class TrainedModel:
    """Result of fitting: parameters, per-view outputs, consensus, history."""

    weights: list  # one (n, n) matrix per layer
    per_view_outputs: list  # final-layer H_v per view
    consensus: np.ndarray
    loss_history: list
    epochs_run: int

    @property
    def W(self):
        return self.weights[0]


# ---------------------------------------------------------------------------
# forward pieces (public, each individually testable)
# ---------------------------------------------------------------------------

def layer_forward(P, W):
    """Shared-parameter layer: P W P^T."""
    P = P.normalized if isinstance(P, TransitionGraph) else np.asarray(P, float)
    W = np.asarray(W, dtype=float)
    if P.shape[1] != W.shape[0] or W.shape[0] != W.shape[1]:
        raise DimensionMismatch(f"P is {P.shape}, W is {W.shape}")
    return P @ W @ P.T


def cross_view_forward(Pv, Pu, S):
    """Cross-view layer: P_v S P_u^T. Reduces to layer_forward when u = v."""
    Pv = Pv.normalized if isinstance(Pv, TransitionGraph) else np.asarray(Pv, float)
    Pu = Pu.normalized if isinstance(Pu, TransitionGraph) else np.asarray(Pu, float)
    S = np.asarray(S, dtype=float)
    if Pv.shape != Pu.shape or Pv.shape[1] != S.shape[0] or S.shape[0] != S.shape[1]:
        raise DimensionMismatch(f"shapes disagree: {Pv.shape}, {Pu.shape}, {S.shape}")
    return Pv @ S @ Pu.T


def multilayer_forward(H_prev, W_l):
    """Stacked layer: H_{l-1} W_l H_{l-1}^T."""
    H_prev = np.asarray(H_prev, dtype=float)
    W_l = np.asarray(W_l, dtype=float)
    if H_prev.shape[1] != W_l.shape[0] or W_l.shape[0] != W_l.shape[1]:
        raise DimensionMismatch(f"H_prev is {H_prev.shape}, W_l is {W_l.shape}")
    return H_prev @ W_l @ H_prev.T


def fuse(H_list, alpha):
    """Fuse per-view outputs with a weighted self-loop: alpha*sum + (1-alpha)*I."""
    if len(H_list) == 0:
        raise EmptyViewList("need at least one view output to fuse")
    n = H_list[0].shape[0]
    for H in H_list:
        if H.shape != (n, n):
            raise DimensionMismatch(f"expected {(n, n)}, got {H.shape}")
    total = np.zeros((n, n))
    for H in H_list:  # fixed ascending view order keeps the sum reproducible
        total += H
    return alpha * total + (1.0 - alpha) * np.eye(n)


def renormalize(H_v):
    """Degree-normalize a per-view output back into a transition graph."""
    return sym_normalize(H_v)


def total_loss(H, Phat_list, H_list, mu):
    """Stationary-diffusion loss plus l2 regularization of the view outputs."""
    if len(Phat_list) != len(H_list):
        raise DimensionMismatch(
            f"{len(Phat_list)} normalized graphs vs {len(H_list)} view outputs"
        )
    H = np.asarray(H, dtype=float)
    sds = 0.0
    for Phat in Phat_list:
        Pm = Phat.normalized if isinstance(Phat, TransitionGraph) else np.asarray(Phat, float)
        if Pm.shape != H.shape:
            raise DimensionMismatch(f"H is {H.shape}, Phat is {Pm.shape}")
        sds += float(np.trace(H.T @ (np.eye(H.shape[0]) - Pm) @ H))
    # I - Phat is positive semi-definite for spectra in [-1, 1]
    if sds < -1e-9:
        raise NonFiniteLoss(f"stationarity term is negative: {sds:g}")
    reg = sum(float(np.sum(Hv * Hv)) for Hv in H_list)
    loss = sds + mu * reg
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"loss is not finite: {loss}")
    return loss


# ---------------------------------------------------------------------------
# fused forward/backward
# ---------------------------------------------------------------------------

def _partner_indices(n_views, cross_view):
    if cross_view and n_views > 1:
        return [(v + 1) % n_views for v in range(n_views)]
    return list(range(n_views))


def _forward(P_list, weights, config):
    """Run the full pipeline; returns (loss, cache) for the backward pass."""
    partners = _partner_indices(len(P_list), config.cross_view)
    views = []
    for v, P in enumerate(P_list):
        Pl, Pr = P, P_list[partners[v]]
        H = Pl @ weights[0] @ Pr.T
        if config.cross_view:
            H = 0.5 * (H + H.T)
        layer_outs = [H]
        for W_l in weights[1:]:
            F = layer_outs[-1]
            layer_outs.append(F @ W_l @ F.T)
        Hv = layer_outs[-1]

        d = Hv.sum(axis=1)
        clamp = d < DEGREE_EPS
        dc = np.where(clamp, DEGREE_EPS, d)
        s = 1.0 / np.sqrt(dc)
        Phat = s[:, None] * Hv * s[None, :]
        views.append({
            "layer_outs": layer_outs, "Hv": Hv,
            "dc": dc, "clamp": clamp, "s": s, "Phat": Phat,
        })

    H_list = [vw["Hv"] for vw in views]
    H = fuse(H_list, config.alpha)
    M = H @ H.T
    n = H.shape[0]

    sds = 0.0
    for vw in views:
        sds += float(np.sum(H * H)) - float(np.sum(vw["Phat"] * M))
    reg = sum(float(np.sum(Hv * Hv)) for Hv in H_list)
    loss = sds + config.mu * reg
    if not np.isfinite(loss):
        raise NonFiniteLoss(f"loss is not finite: {loss}")

    cache = {"views": views, "partners": partners, "H": H, "M": M, "n": n}
    return loss, cache


def _backward(P_list, weights, config, cache):
    """Gradient of the full loss w.r.t. every layer's parameter matrix."""
    views, partners = cache["views"], cache["partners"]
    H, M = cache["H"], cache["M"]
    grads = [np.zeros_like(W) for W in weights]

    # d loss / d H (fused): sum_v [2H - (Phat + Phat^T) H]
    G_H = np.zeros_like(H)
    for vw in views:
        Phat = vw["Phat"]
        G_H += 2.0 * H - (Phat + Phat.T) @ H

    for v, vw in enumerate(views):
        Hv, s, dc, clamp = vw["Hv"], vw["s"], vw["dc"], vw["clamp"]

        # through the fusion (d H / d Hv = alpha * I)
        G = config.alpha * G_H.copy()

        # through Phat = diag(s) Hv diag(s), with s = d^{-1/2}, d = row sums:
        # the loss holds -<Phat, M>, so dL/dPhat = -M
        G += -(np.outer(s, s) * M)
        gs = -((M * Hv) @ s + (M * Hv.T) @ s)  # dL/ds
        gd = gs * (-0.5) * dc ** -1.5  # dL/dd; zero inside the clamp
        gd[clamp] = 0.0
        G += gd[:, None]  # d_k = sum_l Hv[k, l] spreads over row k

        # l2 penalty
        G += 2.0 * config.mu * Hv

        # back through stacked layers H_l = F W_l F^T
        layer_outs = vw["layer_outs"]
        for l in range(len(weights) - 1, 0, -1):
            F = layer_outs[l - 1]
            grads[l] += F.T @ G @ F
            G = G @ F @ weights[l].T + G.T @ F @ weights[l]

        # first layer
        if config.cross_view:
            G = 0.5 * (G + G.T)
        Pl, Pr = P_list[v], P_list[partners[v]]
        grads[0] += Pl.T @ G @ Pr

    for g in grads:
        if not np.all(np.isfinite(g)):
            raise NonFiniteGradient("gradient contains non-finite entries")
    return grads


def grad_w(W, P_list, config):
    """Analytic gradient of the full training loss w.r.t. W (single layer).

    For multi-layer configurations use loss_and_grads, which returns one
    gradient per layer.
    """
    P_list = [P.normalized if isinstance(P, TransitionGraph) else np.asarray(P, float)
              for P in P_list]
    _, grads = loss_and_grads(P_list, [np.asarray(W, dtype=float)], config)
    return grads[0]


def loss_and_grads(P_list, weights, config):
    loss, cache = _forward(P_list, weights, config)
    grads = _backward(P_list, weights, config, cache)
    return loss, grads


def evaluate_loss(P_list, weights, config):
    """Loss only; the finite-difference route used by the gradient check."""
    loss, _ = _forward(P_list, weights, config)
    return loss


# ---------------------------------------------------------------------------
# training loop
# ---------------------------------------------------------------------------

def fit_transition_graphs(P_list, config):
    """Train the shared parameter matrices on pre-built view graphs.

    P_list holds each view's normalized transition matrix. Runs projected
    gradient descent until max_epochs, until `patience` consecutive epochs
    fail to improve the best loss by convergence_tol, or (optionally) until
    the loss falls off a cliff.
    """
    if len(P_list) == 0:
        raise EmptyViewList("need at least one view")
    P_list = [P.normalized if isinstance(P, TransitionGraph) else np.asarray(P, float)
              for P in P_list]
    n = P_list[0].shape[0]
    for P in P_list:
        if P.shape != (n, n):
            raise ViewRowMismatch(f"expected {(n, n)} transition matrix, got {P.shape}")

    weights = [np.eye(n) for _ in range(config.layers)]
    loss, cache = _forward(P_list, weights, config)
    history = [loss]
    best = loss
    stalled = 0

    epoch = 0
    while epoch < config.max_epochs:
        grads = _backward(P_list, weights, config, cache)
        for l, g in enumerate(grads):
            W = weights[l] - config.learning_rate * g
            W = np.maximum(W, 0.0)  # degrees of H_v must stay nonnegative
            weights[l] = 0.5 * (W + W.T)
        try:
            loss, cache = _forward(P_list, weights, config)
        except NonFiniteLoss as exc:
            raise NonFiniteLoss(f"epoch {epoch + 1}: {exc}") from exc
        history.append(loss)
        epoch += 1

        if best - loss > config.convergence_tol:
            best = loss
            stalled = 0
        else:
            stalled += 1
            if stalled >= config.patience:
                break
        prev = history[-2]
        if config.stop_on_cliff and prev > 0 and (prev - loss) / abs(prev) > 0.5:
            break

    final = cache["views"]
    return TrainedModel(
        weights=weights,
        per_view_outputs=[vw["Hv"] for vw in final],
        consensus=cache["H"],
        loss_history=history,
        epochs_run=epoch,
    )


def fit_views(views, config, sigma=0.5, knn=None):
    """Build per-view graphs from raw features, then train.

    Returns (model, graph_list) where graph_list holds each view's
    TransitionGraph.
    """
    if len(views) == 0:
        raise EmptyViewList("need at least one view")
    n = np.asarray(views[0]).shape[0]
    for v, X in enumerate(views):
        if np.asarray(X).shape[0] != n:
            raise ViewRowMismatch(
                f"view 0 has {n} rows but view {v} has {np.asarray(X).shape[0]}"
            )
    graph_list = [graphs.gaussian_affinity(X, sigma=sigma, knn=knn) for X in views]
    model = fit_transition_graphs([g.normalized for g in graph_list], config)
    return model, graph_list


# ---------------------------------------------------------------------------
# sklearn-style estimator
# ---------------------------------------------------------------------------

class StationaryDiffusionClustering(BaseEstimator, ClusterMixin):
    """Multiview clustering on a learned stationary consensus graph.

    Follows the mvlearn convention of taking a list of per-view feature
    matrices (same rows, view-specific columns) in fit. The learned
    consensus graph is exposed as ``consensus_graph_`` and labels are read
    off it with k-means ("km") or spectral clustering ("sc").

    Parameters mirror TrainConfig plus the graph bandwidth and backend.
    """

    def __init__(self, n_clusters=2, backend="sc", sigma=0.5, knn=None,
                 alpha=0.5, mu=1.0, learning_rate=1e-4, max_epochs=1000,
                 patience=10, convergence_tol=1e-8, layers=1,
                 cross_view=False, stop_on_cliff=False, random_state=42):
        self.n_clusters = n_clusters
        self.backend = backend
        self.sigma = sigma
        self.knn = knn
        self.alpha = alpha
        self.mu = mu
        self.learning_rate = learning_rate
        self.max_epochs = max_epochs
        self.patience = patience
        self.convergence_tol = convergence_tol
        self.layers = layers
        self.cross_view = cross_view
        self.stop_on_cliff = stop_on_cliff
        self.random_state = random_state

    def _config(self):
        return TrainConfig(
            alpha=self.alpha, mu=self.mu, learning_rate=self.learning_rate,
            max_epochs=self.max_epochs, patience=self.patience,
            seed=self.random_state, layers=self.layers,
            cross_view=self.cross_view, convergence_tol=self.convergence_tol,
            stop_on_cliff=self.stop_on_cliff,
        )

    def fit(self, Xs, y=None):
        """Learn the consensus graph from a list of per-view feature matrices."""
        if self.backend not in ("km", "sc"):
            raise ValueError(f"backend must be 'km' or 'sc', got {self.backend!r}")
        start = time.perf_counter()
        model, graph_list = fit_views(Xs, self._config(), sigma=self.sigma, knn=self.knn)
        self.model_ = model
        self.view_graphs_ = graph_list
        self.W_ = model.W
        self.weights_ = model.weights
        self.consensus_graph_ = model.consensus
        self.per_view_graphs_ = model.per_view_outputs
        self.loss_history_ = model.loss_history
        self.n_epochs_ = model.epochs_run
        self.fit_time_ = time.perf_counter() - start
        self.labels_ = self._extract_labels(self.backend)
        return self

    def _extract_labels(self, backend):
        if backend == "km":
            part = clustering.kmeans(
                self.consensus_graph_, self.n_clusters, seed=self.random_state
            )
        else:
            part = clustering.spectral(
                self.consensus_graph_, self.n_clusters, seed=self.random_state
            )
        return part.labels

    def fit_predict(self, Xs, y=None):
        return self.fit(Xs).labels_
