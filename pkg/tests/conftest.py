import numpy as np
import pytest

from mvdiff.diffusion import random_doubly_stochastic


def random_block_affinity(rng, n_components, min_block=2, max_block=8, low=0.2, high=1.0):
    """Random symmetric block-diagonal affinity: fully connected blocks with
    positive weights, zero diagonal, no edges between blocks."""
    sizes = [int(rng.integers(min_block, max_block + 1)) for _ in range(n_components)]
    n = sum(sizes)
    A = np.zeros((n, n))
    start = 0
    for size in sizes:
        block = rng.uniform(low, high, size=(size, size))
        block = 0.5 * (block + block.T)
        np.fill_diagonal(block, 0.0)
        A[start:start + size, start:start + size] = block
        start += size
    return A, sizes


def doubly_stochastic_blocks(rng, sizes):
    """Block-diagonal symmetric doubly stochastic matrix (one block per part)."""
    n = sum(sizes)
    P = np.zeros((n, n))
    start = 0
    for size in sizes:
        P[start:start + size, start:start + size] = random_doubly_stochastic(size, rng)
        start += size
    return P


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
