import numpy as np
import pytest

from fpdist import from_edges


def path3():
    # a - b - c
    return from_edges([0, 1], [1, 2], labels=(0, 1, 2))


def star(leaves=3):
    u = np.zeros(leaves, dtype=np.int64)
    v = np.arange(1, leaves + 1, dtype=np.int64)
    return from_edges(u, v, labels=tuple(range(leaves + 1)))


def triangle():
    return from_edges([0, 0, 1], [1, 2, 2], labels=(0, 1, 2))


def complete_minus_edge(n=1000):
    """K_n minus the edge (0, 1)."""
    u, v = np.triu_indices(n, 1)
    keep = ~((u == 0) & (v == 1))
    return from_edges(u[keep], v[keep], labels=tuple(range(n)))


@pytest.fixture
def p3():
    return path3()
