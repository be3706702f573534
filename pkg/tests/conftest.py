import numpy as np
import pytest

import treechol as tc


def random_connected_laplacian(rng, n, extra_factor=2.0, unit_weights=False):
    """Random spanning tree plus extra edges; always connected."""
    edges = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    for _ in range(int(extra_factor * n)):
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u != v:
            edges.add((min(u, v), max(u, v)))
    e = np.array(sorted(edges), dtype=np.int64)
    w = np.ones(len(e)) if unit_weights else rng.random(len(e)) + 0.1
    return tc.laplacian_from_edges(n, e[:, 0], e[:, 1], w)


def random_sddm(rng, n, excess_fraction=0.3):
    """Random connected Laplacian plus positive excess on some rows."""
    lap = random_connected_laplacian(rng, n)
    diag = lap.diag.copy()
    who = rng.random(n) < excess_fraction
    if not who.any():
        who[int(rng.integers(0, n))] = True
    diag[who] += rng.random(who.sum()) + 0.05
    return tc.SparseSym(n, lap.rows, lap.cols, lap.vals, diag)


def complete_laplacian(n):
    iu, ju = np.triu_indices(n, 1)
    return tc.laplacian_from_edges(n, iu, ju, np.ones(iu.size))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
