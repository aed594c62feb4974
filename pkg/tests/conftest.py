import numpy as np
import pytest

from adaptsync.coupling import as_coupling_matrix


def random_a1(rng, n, density=0.4):
    """Random irreducible row-sum-zero matrix with nonnegative off-diagonals.

    A directed ring guarantees strong connectivity; extra edges are sprinkled
    with the given density.  Such a matrix always has a simple zero eigenvalue
    with the rest in the left half plane.
    """
    a = np.zeros((n, n))
    for i in range(n):
        a[i, (i + 1) % n] = rng.uniform(0.1, 1.0)
    extra = rng.random((n, n)) < density
    np.fill_diagonal(extra, False)
    a[extra] = rng.uniform(0.1, 1.0, size=int(extra.sum()))
    np.fill_diagonal(a, 0.0)
    np.fill_diagonal(a, -a.sum(axis=1))
    return a


def random_a2(rng, n, density=0.5):
    """Random connected symmetric row-sum-zero matrix."""
    a = np.zeros((n, n))
    for i in range(n):
        j = (i + 1) % n
        w = rng.uniform(0.1, 1.0)
        a[i, j] = a[j, i] = w
    for i in range(n):
        for j in range(i + 2, n):
            if rng.random() < density:
                w = rng.uniform(0.1, 1.0)
                a[i, j] = a[j, i] = w
    np.fill_diagonal(a, -a.sum(axis=1))
    return a


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def pair_matrix():
    """The smallest symmetric coupling matrix."""
    return as_coupling_matrix([[-1.0, 1.0], [1.0, -1.0]])
