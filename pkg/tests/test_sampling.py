import numpy as np
import pytest

import treechol as tc
from treechol.multigraph import IsolatedVertexError
from conftest import random_connected_laplacian


def edge_laplacian(n, i, j, w):
    m = np.zeros((n, n))
    m[i, i] += w
    m[j, j] += w
    m[i, j] -= w
    m[j, i] -= w
    return m


def exact_clique_matrix(g, v):
    """C_v = diag(a) - a a^T / d on the neighbors of v (dense oracle)."""
    n = g.n
    a = np.zeros(n)
    for u in g.neighbors(v):
        a[u] = g.pair_weight(v, u)
    d = a.sum()
    c = np.diag(a) - np.outer(a, a) / d
    c[v, :] = 0
    c[:, v] = 0
    return c


def star_graph(weights):
    g = tc.MultiGraph(len(weights) + 1)
    for i, w in enumerate(weights):
        g.add_edge(0, i + 1, w)
    return g


def test_stars_degree2_deterministic():
    g = star_graph([2.0, 3.0])
    stars = tc.elimination_stars(0, g)
    assert len(stars) == 1
    (target, p), = stars[0].targets
    assert p == 1.0
    assert stars[0].weight == pytest.approx(2.0 * 3.0 / 5.0)


def test_stars_degree3_unit_weights_explicit_order():
    g = star_graph([1.0, 1.0, 1.0])
    stars = tc.elimination_stars(0, g, neighbor_order=[1, 2, 3])
    assert stars[0].center == 1
    assert [t for t, _ in stars[0].targets] == [2, 3]
    assert [p for _, p in stars[0].targets] == [0.5, 0.5]
    assert stars[0].weight == pytest.approx(2.0 / 3.0)


def test_star_expectations_sum_to_exact_clique():
    g = star_graph([1.0, 1.0, 1.0])
    cv = exact_clique_matrix(g, 0)
    total = np.zeros_like(cv)
    for star in tc.elimination_stars(0, g):
        for j, p in star.targets:
            total += p * star.weight * edge_laplacian(g.n, star.center, j, 1.0)
    assert np.allclose(total, cv, atol=1e-14)
    assert cv[1, 2] == pytest.approx(-1.0 / 3.0)


def test_star_level_exactness_random(rng):
    # sum_j p_i(j) * w * L_(i,j) = S_i entrywise
    for _ in range(50):
        deg = int(rng.integers(2, 20))
        ws = rng.random(deg) + 0.05
        g = star_graph(list(ws))
        nbrs, w_sorted, _, d = tc.star_order(g, 0)
        stars = tc.elimination_stars(0, g)
        for t, star in enumerate(stars):
            expected = np.zeros((g.n, g.n))
            for q in range(t + 1, deg):
                expected += edge_laplacian(g.n, nbrs[t], nbrs[q],
                                           w_sorted[t] * w_sorted[q] / d)
            got = np.zeros((g.n, g.n))
            for j, p in star.targets:
                got += p * star.weight * edge_laplacian(g.n, star.center, j, 1.0)
            assert np.abs(got - expected).max() <= 1e-12 * max(1.0, d)


def test_tree_sample_degree1_empty():
    g = star_graph([2.0])
    assert tc.clique_tree_sample(1, g, tc.SampleStream(0)) == []


def test_tree_sample_isolated_raises():
    g = tc.MultiGraph(3)
    g.add_edge(0, 1, 1.0)
    with pytest.raises(IsolatedVertexError):
        tc.clique_tree_sample(2, g, tc.SampleStream(0))


def test_tree_sample_degree2_forced():
    g = star_graph([2.0, 3.0])
    for seed in range(10):
        (i, j, w), = tc.clique_tree_sample(0, g, tc.SampleStream(seed))
        assert {i, j} == {1, 2}
        assert w == pytest.approx(6.0 / 5.0)


def test_tree_sample_monte_carlo_matches_clique(rng):
    g = star_graph([1.0, 1.0, 1.0, 1.0])
    cv = exact_clique_matrix(g, 0)
    n_draws = 100_000
    acc = np.zeros((g.n, g.n))
    acc2 = np.zeros((g.n, g.n))
    for s in range(n_draws):
        m = np.zeros((g.n, g.n))
        for i, j, w in tc.clique_tree_sample(0, g, tc.SampleStream(s)):
            m += edge_laplacian(g.n, i, j, w)
        acc += m
        acc2 += m * m
    mean = acc / n_draws
    se = np.sqrt(np.maximum(acc2 / n_draws - mean ** 2, 0) / n_draws)
    dev = np.abs(mean - cv) / np.maximum(se, 1e-300)
    assert dev[se > 0].max() <= 5.0
    assert np.abs(mean[se == 0] - cv[se == 0]).max() <= 1e-12


def test_tree_property_random_graphs(rng):
    for trial in range(300):
        n = int(rng.integers(3, 16))
        lap = random_connected_laplacian(rng, n)
        g = tc.MultiGraph.from_sparse(lap)
        v = int(rng.integers(0, n))
        if g.degree(v) == 0:
            continue
        nbrs = set(g.neighbors(v))
        edges = tc.clique_tree_sample(v, g, tc.SampleStream(trial))
        assert len(edges) == len(nbrs) - 1
        # spanning tree on the neighbors: connected and acyclic
        parent = {u: u for u in nbrs}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j, w in edges:
            assert i != j and w > 0
            ri, rj = find(i), find(j)
            assert ri != rj  # acyclic
            parent[ri] = rj
        assert len({find(u) for u in nbrs}) == 1  # connected


def test_merge_reduces_to_simple_sampler_on_shared_stream(rng):
    for trial in range(30):
        n = int(rng.integers(3, 14))
        lap = random_connected_laplacian(rng, n)
        g = tc.MultiGraph.from_sparse(lap)  # all multiplicities 1
        v = int(rng.integers(0, n))
        if g.degree(v) == 0:
            continue
        simple = tc.clique_tree_sample(v, g, tc.SampleStream(trial))
        merged = tc.clique_tree_sample_multiedge_merge(
            1, v, g, tc.SampleStream(trial))
        assert simple == merged


def test_merge_caps_samples_per_pair():
    g = tc.MultiGraph(3)
    g.add_edge(0, 1, 1.0, count=3)  # one neighbor holding 3 multi-edges
    g.add_edge(0, 2, 5.0, count=1)
    out = tc.clique_tree_sample_multiedge_merge(2, 0, g, tc.SampleStream(0))
    from_pair = [s for s in out if s[0] == 1]
    assert len(from_pair) == 2  # min(3, 2)
    assert all(j == 2 for _, j, _ in from_pair)
    assert g.degree(0) == 0  # pairs incident to v removed


def test_merge_unbounded_uses_all_multiplicity():
    g = tc.MultiGraph(3)
    g.add_edge(0, 1, 1.0, count=3)
    g.add_edge(0, 2, 5.0, count=1)
    out = tc.clique_tree_sample_multiedge_merge(None, 0, g,
                                                tc.SampleStream(0))
    assert len([s for s in out if s[0] == 1]) == 3


def test_merge_monte_carlo_after_split(rng):
    # K4 center after split k=2: mean of sampled clique equals exact C_v
    iu, ju = np.triu_indices(4, 1)
    lap = tc.laplacian_from_edges(4, iu, ju, np.ones(6))
    base = tc.MultiGraph.from_sparse(lap, split=2)
    cv = exact_clique_matrix(base, 0)
    n_draws = 100_000
    acc = np.zeros((4, 4))
    acc2 = np.zeros((4, 4))
    for s in range(n_draws):
        g = base.copy()
        m = np.zeros((4, 4))
        for i, j, w in tc.clique_tree_sample_multiedge_merge(
                2, 0, g, tc.SampleStream(s)):
            m += edge_laplacian(4, i, j, w)
        acc += m
        acc2 += m * m
    mean = acc / n_draws
    se = np.sqrt(np.maximum(acc2 / n_draws - mean ** 2, 0) / n_draws)
    dev = np.abs(mean - cv) / np.maximum(se, 1e-300)
    assert dev[se > 0].max() <= 5.0


def test_elimination_preserves_component_connectivity(rng):
    for trial in range(20):
        n = int(rng.integers(4, 20))
        lap = random_connected_laplacian(rng, n)
        g = tc.MultiGraph.from_sparse(lap)
        alive = set(range(n))
        stream = tc.SampleStream(trial)
        for pos in range(n - 1):
            v = min(alive, key=lambda u: (g.degree(u), u))
            if g.degree(v) > 0:
                tc.clique_tree_sample_multiedge_merge(1, v, g, stream.at(pos))
            alive.discard(v)
            labels = {u: u for u in alive}

            def find(x):
                while labels[x] != x:
                    labels[x] = labels[labels[x]]
                    x = labels[x]
                return x

            for u in alive:
                for w in g.neighbors(u):
                    labels[find(u)] = find(w)
            assert len({find(u) for u in alive}) == 1
