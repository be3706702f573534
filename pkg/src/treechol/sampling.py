"""Elimination stars and the clique sampling rules.

Eliminating a vertex v with star weights a and weighted degree d creates a
clique on its neighbors: diag(a) - a a^T / d.  Under an ordering of the
neighbors, the clique splits into one "elimination star" per neighbor i,
holding the edges from i to strictly later neighbors j with weight
a(i) a(j) / d.  Each star is approximated by a single weighted random edge
(or by t multi-edge samples in the split/merge variants), chosen so the
expectation is exact; the union of the samples is always a spanning tree of
the neighbors, plus parallel copies when multi-edges are in play.

These are the readable reference implementations; they consume the same
counter-RNG stream as the compiled kernel in ``_kernels.py``, so both produce
identical factorizations for identical seeds.

Collection, sorting and accumulation orders in this module are deliberate:
they mirror the kernel operation-for-operation so the cross test can demand
bit equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from .multigraph import IsolatedVertexError, MultiGraph
from .rng import SampleStream


@dataclass(frozen=True)
class EliminationStar:
    """One neighbor's share of an elimination clique."""

    center: int
    #: (target vertex, selection probability); probabilities sum to 1
    targets: tuple
    #: weight assigned to the single sampled edge
    weight: float


def star_order(g: MultiGraph, v: int):
    """Neighbors of v sorted by ascending pair weight, ties by index.

    Returns (neighbors, weights, d) where d is the weighted degree
    accumulated over the sorted weights.
    """
    items = [(u, cell[0], cell[1]) for u, cell in g.adj[v].items()]
    items.sort(key=lambda it: (it[1], it[0]))
    nbrs = [it[0] for it in items]
    ws = [it[1] for it in items]
    counts = [it[2] for it in items]
    d = 0.0
    for w in ws:
        d += w
    return nbrs, ws, counts, d


def _prefix(ws):
    p = [0.0] * (len(ws) + 1)
    for t, w in enumerate(ws):
        p[t + 1] = p[t] + w
    return p


def _search(p, lo, hi, target):
    # smallest q in [lo, hi] with p[q+1] > target
    while lo < hi:
        mid = (lo + hi) // 2
        if p[mid + 1] > target:
            hi = mid
        else:
            lo = mid + 1
    return lo


def elimination_stars(v: int, g: MultiGraph, neighbor_order=None):
    """Decompose the elimination clique of v into stars.

    With k neighbors there are k - 1 stars; the last neighbor in the order
    has no later targets.  The expectations of the stars' single-edge samples
    sum to the exact clique.
    """
    if g.degree(v) == 0:
        raise IsolatedVertexError(f"vertex {v} has no neighbors")
    if neighbor_order is None:
        nbrs, ws, _, d = star_order(g, v)
    else:
        nbrs = list(neighbor_order)
        if sorted(nbrs) != sorted(g.neighbors(v)):
            raise ValueError("neighbor_order must be a permutation of N(v)")
        ws = [g.pair_weight(v, u) for u in nbrs]
        d = 0.0
        for w in ws:
            d += w
    p = _prefix(ws)
    stars = []
    for t in range(len(nbrs) - 1):
        rw = p[-1] - p[t + 1]
        targets = tuple((nbrs[q], ws[q] / rw) for q in range(t + 1, len(nbrs)))
        stars.append(EliminationStar(nbrs[t], targets, ws[t] * rw / d))
    return stars


def clique_tree_sample(v: int, g: MultiGraph, stream: SampleStream):
    """Sample one reweighted edge per elimination star of v.

    Returns deg(v) - 1 edges (i, j, weight) forming a spanning tree on the
    neighbors of v; the expected edge Laplacian equals the elimination
    clique.  The graph is not modified.
    """
    if g.degree(v) == 0:
        raise IsolatedVertexError(f"vertex {v} has no neighbors")
    nbrs, ws, _, d = star_order(g, v)
    p = _prefix(ws)
    deg = len(nbrs)
    out = []
    for t in range(deg - 1):
        rw = p[deg] - p[t + 1]
        u = stream.u01(t, 0)
        q = _search(p, t + 1, deg - 1, p[t + 1] + u * rw)
        out.append((nbrs[t], nbrs[q], (ws[t] * rw) / d))
    return out


def clique_tree_sample_multiedge_merge(l, v: int, g: MultiGraph,
                                       stream: SampleStream):
    """Split/merge clique sampling; updates g in place.

    Per neighbor i (ascending pair weight) the pair's multi-edges are merged
    down to t = min(count, l) samples of averaged weight; each sample picks a
    later neighbor j proportionally to residual pair weight and inserts a
    multi-edge (i, j) of weight w_bar * residual / d.  ``l=None`` leaves the
    multiplicity unbounded.  All pairs incident to v are removed.  Returns
    the sampled multi-edges.
    """
    if g.degree(v) == 0:
        raise IsolatedVertexError(f"vertex {v} has no neighbors")
    nbrs, ws, counts, d = star_order(g, v)
    for u in list(g.neighbors(v)):
        g.remove_pair(v, u)
    p = _prefix(ws)
    deg = len(nbrs)
    out = []
    for t in range(deg - 1):
        tc = counts[t] if l is None else min(counts[t], int(l))
        wbar = ws[t] / tc
        rw = p[deg] - p[t + 1]
        wnew = (wbar * rw) / d
        for h in range(tc):
            u = stream.u01(t, h)
            q = _search(p, t + 1, deg - 1, p[t + 1] + u * rw)
            g.add_edge(nbrs[t], nbrs[q], wnew, count=1)
            out.append((nbrs[t], nbrs[q], wnew))
    return out


def exact_clique(v: int, g: MultiGraph):
    """All-pairs exact clique edges for eliminating v; updates g in place."""
    if g.degree(v) == 0:
        raise IsolatedVertexError(f"vertex {v} has no neighbors")
    nbrs, ws, _, d = star_order(g, v)
    for u in list(g.neighbors(v)):
        g.remove_pair(v, u)
    out = []
    for t in range(len(nbrs) - 1):
        for q in range(t + 1, len(nbrs)):
            w = ws[t] * ws[q] / d
            g.add_edge(nbrs[t], nbrs[q], w, count=1)
            out.append((nbrs[t], nbrs[q], w))
    return out
