"""Synthetic multiview fixtures: Gaussian blobs seen through random views.

Latent blob coordinates are rendered into each view by an independent random
orthogonal map (distance-preserving, so one kernel bandwidth works for every
view) plus additive noise.
"""

import numpy as np


def make_multiview_blobs(n=150, k=3, n_views=2, separation=8.0, noise=0.02,
                         dim=16, cluster_std=0.05, seed=42):
    """Generate a multiview blob dataset.

    separation is the minimum center-to-center distance in units of the
    within-cluster spread (the RMS distance from a point to its cluster
    center, cluster_std * sqrt(dim)). Returns (views, labels) with views a
    list of (n, dim) arrays and labels a length-n integer vector.
    """
    if k < 1 or n < k:
        raise ValueError(f"need n >= k >= 1, got n = {n}, k = {k}")
    rng = np.random.default_rng(seed)

    spread = cluster_std * np.sqrt(dim)
    centers = rng.normal(size=(k, dim))
    if k > 1:
        dists = [np.linalg.norm(centers[i] - centers[j])
                 for i in range(k) for j in range(i + 1, k)]
        centers *= (separation * spread) / min(dists)

    sizes = [n // k + (1 if i < n % k else 0) for i in range(k)]
    labels = np.repeat(np.arange(k), sizes)
    latent = centers[labels] + cluster_std * rng.normal(size=(n, dim))

    views = []
    for _ in range(n_views):
        q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
        X = latent @ q + noise * cluster_std * rng.normal(size=(n, dim))
        views.append(X)
    return views, labels
