"""Affinity graph construction and symmetric normalization.

Per-view graphs are built with a Gaussian kernel on Euclidean distances and
normalized as D^{-1/2} A D^{-1/2}. The normalized matrix is the diffusion
(transition) operator everything downstream consumes.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.spatial.distance import squareform, pdist

from .exceptions import (
    AsymmetricInput,
    NegativeEntry,
    NonFiniteFeature,
    NonPositiveSigma,
)

# Degree smaller than this is treated as an isolated node: it is clamped
# before the inverse square root so the normalization stays finite, and the
# node is flagged as degenerate.
DEGREE_EPS = 1e-12


@dataclass
class TransitionGraph:
    """A symmetric nonnegative affinity graph and its normalized form.

    Attributes
    ----------
    affinity : (n, n) symmetric nonnegative array
    degrees : (n,) row sums of ``affinity``
    normalized : (n, n) array, D^{-1/2} A D^{-1/2}
    degenerate : (n,) boolean mask of nodes whose degree fell below the clamp
    """

    affinity: np.ndarray
    degrees: np.ndarray
    normalized: np.ndarray
    degenerate: np.ndarray = field(default=None)

    @property
    def n_nodes(self):
        return self.affinity.shape[0]

    @property
    def has_degenerate_degrees(self):
        return bool(self.degenerate is not None and self.degenerate.any())


def _check_symmetric(A, atol=0.0):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise AsymmetricInput(f"expected a square matrix, got shape {A.shape}")
    dev = np.abs(A - A.T).max() if A.size else 0.0
    if dev > atol:
        raise AsymmetricInput(f"matrix is not symmetric, max |a_ij - a_ji| = {dev:g}")
    return A


def gaussian_affinity(X, sigma=0.5, knn=None):
    """Build a Gaussian-kernel affinity graph from a feature matrix.

    a_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)) for i != j, and a_ii = 0:
    self-loops are injected later, by the weighted identity in the fusion
    step, so the kernel itself carries none.

    Parameters
    ----------
    X : (n, d) array of finite features, n >= 2
    sigma : positive kernel bandwidth
    knn : optional int; if given, keep only the symmetrized k-nearest-neighbor
        edges (union of directions). Off by default.
    """
    if sigma <= 0:
        raise NonPositiveSigma(f"sigma must be > 0, got {sigma}")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        raise NonFiniteFeature(f"need at least 2 samples, got {X.shape[0]}")
    bad = ~np.isfinite(X)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise NonFiniteFeature(f"non-finite feature at row {r}, column {c}")

    sq = squareform(pdist(X, metric="sqeuclidean"))
    A = np.exp(-sq / (2.0 * sigma * sigma))
    np.fill_diagonal(A, 0.0)
    A = 0.5 * (A + A.T)  # pdist is symmetric; guard against rounding

    if knn is not None:
        keep = np.zeros_like(A, dtype=bool)
        # argsort descending; skip self (affinity 0 on the diagonal)
        order = np.argsort(-A, axis=1)[:, :knn]
        rows = np.repeat(np.arange(A.shape[0]), order.shape[1])
        keep[rows, order.ravel()] = True
        keep |= keep.T
        A = np.where(keep, A, 0.0)

    return sym_normalize(A)


def sym_normalize(A, sym_atol=1e-10):
    """Symmetrically normalize a nonnegative affinity matrix.

    Returns a TransitionGraph with normalized = D^{-1/2} A D^{-1/2} where
    D = diag(row sums). Degrees below DEGREE_EPS are clamped and the node is
    flagged degenerate (its normalized row stays all zero).
    """
    A = _check_symmetric(A, atol=sym_atol)
    if (A < 0).any():
        i, j = np.argwhere(A < 0)[0]
        raise NegativeEntry(f"negative affinity {A[i, j]:g} at ({i}, {j})")
    A = 0.5 * (A + A.T)  # exact symmetry from here on
    degrees = A.sum(axis=1)
    degenerate = degrees < DEGREE_EPS
    clamped = np.where(degenerate, DEGREE_EPS, degrees)
    inv_sqrt = 1.0 / np.sqrt(clamped)
    normalized = inv_sqrt[:, None] * A * inv_sqrt[None, :]
    return TransitionGraph(
        affinity=A, degrees=degrees, normalized=normalized, degenerate=degenerate
    )


def connected_components(A, tol=0.0):
    """Count connected components of a symmetric graph.

    Edges with weight <= tol are treated as absent. Isolated nodes count as
    their own components.
    """
    if tol < 0:
        raise ValueError(f"tol must be >= 0, got {tol}")
    A = _check_symmetric(A, atol=0.0)
    adj = csr_matrix((A > tol).astype(np.int8))
    n_comp, _ = _cc(adj, directed=False)
    return int(n_comp)
