import numpy as np
import pytest

from edgemorph import EdgeSet, build_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_edgeset(rng, grid, density=0.5):
    return EdgeSet.from_mask(grid, rng.random(grid.n_edges) < density)


def all_edgesets(grid):
    n = grid.n_edges
    bits = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
    return [EdgeSet.from_mask(grid, row.astype(bool)) for row in bits]


@pytest.fixture
def grid_2x3():
    # 3 columns, 2 rows, 4-connected: 7 edges
    return build_grid(3, 2, 4)
