"""Brute-force diffusion identities used as verification oracles.

These routines deliberately favor directness over speed: Kronecker products
are materialized, eigendecompositions are dense, and size limits are hard.
They exist so the trained model can be checked against independently coded
linear algebra.
"""

import numpy as np

from .exceptions import (
    AsymmetricInput,
    DimensionMismatch,
    EigensolverFailure,
    SizeLimitExceeded,
)
from .graphs import TransitionGraph

# Kronecker products are n^2 x n^2; past this the oracle refuses to build them.
KRON_MAX_N = 12
# The quadruple sum in quadratic_identity_check costs n^4 terms.
QUAD_MAX_N = 8


def _as_matrix(P):
    if isinstance(P, TransitionGraph):
        return P.normalized
    return np.asarray(P, dtype=float)


def diffuse_step(P, h):
    """One diffusion step: the state vector h becomes P h."""
    P = _as_matrix(P)
    h = np.asarray(h, dtype=float)
    if P.shape[1] != h.shape[0]:
        raise DimensionMismatch(f"P is {P.shape}, h has length {h.shape[0]}")
    return P @ h

def stationarity_residual(P, h):
    """||h - P h||_2; zero iff h is a stationary state of P."""
    P = _as_matrix(P)
    h = np.asarray(h, dtype=float)
    if P.shape[1] != h.shape[0]:
        raise DimensionMismatch(f"P is {P.shape}, h has length {h.shape[0]}")
    return float(np.linalg.norm(h - P @ h))


def hyper_transition(P1, P2):
    """Materialize the joint two-view transition operator kron(P1, P2)."""
    P1, P2 = _as_matrix(P1), _as_matrix(P2)
    n = P1.shape[0]
    if P1.shape != P2.shape or P1.shape[0] != P1.shape[1]:
        raise DimensionMismatch(f"views must be square and equal-sized, got {P1.shape} and {P2.shape}")
    if n > KRON_MAX_N:
        raise SizeLimitExceeded(f"n = {n} exceeds the Kronecker bound {KRON_MAX_N}")
    return np.kron(P1, P2)


def hyper_diffuse_check(P1, P2, S):
    """Check the vec identity behind joint diffusion of a similarity matrix.

    Diffusing vec(S) with kron(P1, P2) must equal vec(P2 S P1^T). Returns the
    small-form result P2 S P1^T together with the max entrywise deviation
    between the two routes.
    """
    P1, P2, S = _as_matrix(P1), _as_matrix(P2), np.asarray(S, dtype=float)
    if S.shape != P1.shape:
        raise DimensionMismatch(f"S is {S.shape}, views are {P1.shape}")
    big = hyper_transition(P1, P2)
    small_form = P2 @ S @ P1.T
    # vec() stacks columns, i.e. Fortran-order ravel
    diffused = big @ S.ravel(order="F")
    max_deviation = float(np.abs(small_form.ravel(order="F") - diffused).max())
    return small_form, max_deviation


def eigen_multiplicity_of_one(P, tol=1e-6):
    """Count eigenvalues of a symmetric matrix within tol of 1.

    For a symmetrically normalized graph this equals the number of connected
    components (with all degrees bounded away from zero).
    """
    P = _as_matrix(P)
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    dev = np.abs(P - P.T).max() if P.size else 0.0
    if dev > 1e-10:
        raise AsymmetricInput(f"matrix is not symmetric, max |p_ij - p_ji| = {dev:g}")
    try:
        eigvals = np.linalg.eigvalsh(P)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return int(np.sum(np.abs(eigvals - 1.0) <= tol))


def stationary_basis(P, tol=1e-6):
    """Orthonormal eigenvectors of a symmetric P for eigenvalue 1, as columns."""
    P = _as_matrix(P)
    dev = np.abs(P - P.T).max() if P.size else 0.0
    if dev > 1e-10:
        raise AsymmetricInput(f"matrix is not symmetric, max |p_ij - p_ji| = {dev:g}")
    try:
        eigvals, eigvecs = np.linalg.eigh(P)
    except np.linalg.LinAlgError as exc:
        raise EigensolverFailure(str(exc)) from exc
    return eigvecs[:, np.abs(eigvals - 1.0) <= tol]


def quadratic_identity_check(P1, P2, S):
    """Evaluate both sides of the joint-diffusion quadratic form.

    lhs = g^T (I - kron(P1, P2)) g with g = vec(S);
    rhs = 0.5 * sum_{ijkl} p1_ij p2_kl (s_ik - s_jl)^2.

    The two agree when P1 and P2 are symmetric doubly stochastic and S is
    symmetric; both values are returned so callers compare them.
    """
    P1, P2, S = _as_matrix(P1), _as_matrix(P2), np.asarray(S, dtype=float)
    n = P1.shape[0]
    if n > QUAD_MAX_N:
        raise SizeLimitExceeded(f"n = {n} exceeds the quadruple-sum bound {QUAD_MAX_N}")
    if S.shape != P1.shape or P2.shape != P1.shape:
        raise DimensionMismatch(f"shapes disagree: {P1.shape}, {P2.shape}, {S.shape}")
    dev = np.abs(S - S.T).max() if S.size else 0.0
    if dev > 1e-10:
        raise AsymmetricInput(f"S is not symmetric, max |s_ij - s_ji| = {dev:g}")

    g = S.ravel(order="F")
    big = np.kron(P1, P2)
    lhs = float(g @ (g - big @ g))

    rhs = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    d = S[i, k] - S[j, l]
                    rhs += P1[i, j] * P2[k, l] * d * d
    rhs *= 0.5
    return lhs, float(rhs)


def random_doubly_stochastic(n, rng, iters=200):
    """Random symmetric doubly stochastic matrix via symmetric Sinkhorn scaling."""
    A = rng.uniform(0.1, 1.0, size=(n, n))
    A = 0.5 * (A + A.T)
    for _ in range(iters):
        d = A.sum(axis=1)
        inv_sqrt = 1.0 / np.sqrt(d)
        A = inv_sqrt[:, None] * A * inv_sqrt[None, :]
        A = 0.5 * (A + A.T)
    return A
