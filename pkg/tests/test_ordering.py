import treechol as tc
from treechol.ordering import MinDegreeQueue, degree_bucket
from conftest import random_connected_laplacian


def test_degree_buckets():
    assert [degree_bucket(d) for d in [0, 1, 2, 3, 4, 5, 8, 9]] == \
        [0, 0, 1, 2, 2, 3, 3, 4]


def test_star_leaves_before_center():
    g = tc.MultiGraph(6)
    for leaf in range(1, 6):
        g.add_edge(0, leaf, 1.0)
    q = tc.elimination_order(g)
    order = [q.pop() for _ in range(6)]
    assert order.index(0) > 0  # a leaf pops first
    assert order[0] != 0


def test_path_endpoints_first():
    g = tc.MultiGraph(5)
    for v in range(4):
        g.add_edge(v, v + 1, 1.0)
    q = tc.elimination_order(g)
    assert q.pop() in (0, 4)


def test_each_vertex_exactly_once():
    q = MinDegreeQueue([3, 1, 2, 2, 0])
    out = [q.pop() for _ in range(5)]
    assert sorted(out) == [0, 1, 2, 3, 4]
    assert not q


def test_update_reflected_before_next_pop():
    q = MinDegreeQueue([5, 5, 5])
    q.update(2, 1)
    assert q.pop() == 2


def test_popped_degree_within_twice_minimum(rng):
    # simulate a full sampled elimination, checking the bound at every pop;
    # every vertex whose degree changed is notified before the next pop
    lap = random_connected_laplacian(rng, 60)
    g = tc.MultiGraph.from_sparse(lap)
    q = tc.elimination_order(g)
    stream = tc.SampleStream(11)
    remaining = set(range(g.n))
    for pos in range(g.n):
        v = q.pop()
        remaining.discard(v)
        if remaining:
            low = min(g.degree(u) for u in remaining)
            assert g.degree(v) <= max(1, 2 * low)
        if g.degree(v) > 0:
            nbrs = list(g.neighbors(v))
            samples = tc.clique_tree_sample_multiedge_merge(
                1, v, g, stream.at(pos))
            for u in nbrs:
                q.update(u, g.degree(u))
            for u in {x for s in samples for x in (s[0], s[1])}:
                q.update(u, g.degree(u))
    assert not q
