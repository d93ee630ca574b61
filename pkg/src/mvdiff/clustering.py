"""Label extraction: k-means, spectral clustering, and optimal assignment.

Desk-scale implementations with deterministic seeding. k-means is written
out (k-means++ init, Lloyd iterations, best-of restarts) so its contract --
deterministic ties to the lowest centroid index, monotone inertia -- is
actually guaranteed rather than assumed of a library.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .exceptions import (
    EigensolverFailure,
    EmptyInput,
    NonFinite,
    NonSquare,
    TooManyClusters,
)
from .graphs import sym_normalize


@dataclass
class Partition:
    """Cluster labels in {0..k-1} plus the cluster count."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=int)
        if self.labels.size and self.labels.max() >= self.k:
            raise ValueError(f"label {self.labels.max()} out of range for k = {self.k}")


def _kmeans_pp_init(points, k, rng):
    """k-means++ seeding: D^2-weighted sampling of successive centroids."""
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = points[first]
    closest = np.sum((points - centroids[0]) ** 2, axis=1)
    for c in range(1, k):
        total = closest.sum()
        if total <= 0:
            # all remaining points coincide with a centroid; pick the first
            idx = int(np.argmax(closest)) if closest.max() > 0 else int(rng.integers(n))
        else:
            r = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(closest), r))
            idx = min(idx, n - 1)
        centroids[c] = points[idx]
        closest = np.minimum(closest, np.sum((points - centroids[c]) ** 2, axis=1))
    return centroids


def _lloyd(points, centroids, max_iter, tol):
    """Lloyd iterations; returns (labels, inertia). Ties go to the lowest index."""
    k = centroids.shape[0]
    prev_inertia = np.inf
    for _ in range(max_iter):
        d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
        labels = np.argmin(d2, axis=1)  # argmin takes the lowest index on ties
        inertia = float(d2[np.arange(points.shape[0]), labels].sum())
        # inertia must not increase across iterations (up to rounding)
        assert inertia <= prev_inertia + 1e-9 * (1.0 + prev_inertia if np.isfinite(prev_inertia) else 1.0)
        prev_inertia = inertia

        new_centroids = centroids.copy()
        moved_empty = False
        for c in range(k):
            members = points[labels == c]
            if len(members):
                new_centroids[c] = members.mean(axis=0)
            else:
                # re-seed an empty cluster at the worst-fit point
                worst = int(np.argmax(d2[np.arange(points.shape[0]), labels]))
                new_centroids[c] = points[worst]
                moved_empty = True
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        if shift < tol and not moved_empty:
            break
        if moved_empty:
            prev_inertia = np.inf  # reassignment invalidates the monotonicity baseline
    d2 = np.sum((points[:, None, :] - centroids[None, :, :]) ** 2, axis=2)
    labels = np.argmin(d2, axis=1)
    inertia = float(d2[np.arange(points.shape[0]), labels].sum())
    return labels, inertia


def kmeans(points, k, seed=0, restarts=10, max_iter=300, tol=1e-9):
    """k-means with k-means++ seeding, best inertia over restarts."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    if points.size == 0:
        raise EmptyInput("no points to cluster")
    if not np.all(np.isfinite(points)):
        raise NonFinite("points contain non-finite entries")
    n = points.shape[0]
    if k < 1 or k > n:
        raise TooManyClusters(f"k = {k} with n = {n} points")

    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(restarts):
        centroids = _kmeans_pp_init(points, k, rng)
        labels, inertia = _lloyd(points, centroids, max_iter, tol)
        if inertia < best_inertia:  # strict: ties keep the earliest restart
            best_labels, best_inertia = labels, inertia
    return Partition(labels=best_labels, k=k)


def spectral(H, k, seed=0, restarts=10):
    """Spectral clustering of a symmetric nonnegative similarity matrix.

    Symmetric normalization, top-k eigenvectors, row normalization to the
    unit sphere, then k-means on the embedding.
    """
    H = np.asarray(H, dtype=float)
    n = H.shape[0]
    if k < 1 or k > n:
        raise TooManyClusters(f"k = {k} with n = {n} nodes")
    P = sym_normalize(H).normalized
    try:
        eigvals, eigvecs = np.linalg.eigh(P)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    emb = eigvecs[:, -k:]  # eigh sorts ascending; take the k largest
    norms = np.linalg.norm(emb, axis=1)
    nonzero = norms > 0
    emb = emb.copy()
    emb[nonzero] /= norms[nonzero, None]  # zero rows stay zero
    return kmeans(emb, k, seed=seed, restarts=restarts)


def hungarian(cost):
    """Minimum-cost square assignment.

    Returns (permutation, total) where permutation[i] is the column assigned
    to row i. Among optima the lexicographically smallest permutation is
    returned (fixed row by row against re-solved subproblems).
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise NonSquare(f"cost matrix must be square, got shape {cost.shape}")
    if not np.all(np.isfinite(cost)):
        raise NonFinite("cost matrix contains non-finite entries")
    k = cost.shape[0]

    rows, cols = linear_sum_assignment(cost)
    total = float(cost[rows, cols].sum())
    slack = 1e-9 * (1.0 + abs(total))

    perm = np.empty(k, dtype=int)
    remaining = list(range(k))
    running = 0.0
    for i in range(k):
        for j in remaining:  # ascending, so the first feasible choice is lex-smallest
            rest = [c for c in remaining if c != j]
            if rest:
                sub = cost[np.ix_(range(i + 1, k), rest)]
                r, c = linear_sum_assignment(sub)
                rest_total = float(sub[r, c].sum())
            else:
                rest_total = 0.0
            if running + cost[i, j] + rest_total <= total + slack:
                perm[i] = j
                running += cost[i, j]
                remaining.remove(j)
                break
    return perm, total


def best_label_matching(counts):
    """Max-agreement matching of predicted to true clusters.

    counts is an r x c contingency table; returns the matched count under
    the optimal one-to-one assignment (table padded square with zeros).
    """
    counts = np.asarray(counts, dtype=float)
    k = max(counts.shape)
    padded = np.zeros((k, k))
    padded[: counts.shape[0], : counts.shape[1]] = counts
    _, total = hungarian(-padded)
    return -total
