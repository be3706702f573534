"""Mutable weighted multi-graph, the elimination workspace.

Parallel multi-edges between a pair are stored as (weight sum, multiplicity)
rather than individual edges: with multi-edge averaging always on, only the
pair totals are ever observable (t = min(count, l), w_bar = sum / t), and
appending a sampled multi-edge is an O(1) accumulate.
"""

from __future__ import annotations

import numpy as np

from .sparsesym import SparseSym, laplacian_from_edges


class IsolatedVertexError(ValueError):
    pass


class MultiGraph:
    """Adjacency-dict multi-graph with positive weights.

    ``adj[u]`` maps each neighbor to a mutable ``[weight_sum, count]`` pair;
    dict insertion order is the pair-creation order, which the elimination
    routines rely on for reproducibility.  A graph is owned by at most one
    elimination at a time.
    """

    def __init__(self, n: int):
        self.n = int(n)
        self.adj: list[dict[int, list]] = [dict() for _ in range(self.n)]

    @classmethod
    def from_sparse(cls, m: SparseSym, split: int = 1) -> "MultiGraph":
        """Multi-graph of a Laplacian; each entry becomes `split` multi-edges."""
        g = cls(m.n)
        for i, j, v in zip(m.rows, m.cols, m.vals):
            if v > 0:
                raise ValueError("Laplacian off-diagonals must be non-positive")
            if v != 0:
                g.add_edge(int(i), int(j), -float(v), count=int(split))
        return g

    def add_edge(self, u: int, v: int, w: float, count: int = 1) -> None:
        if u == v:
            raise ValueError("self-loops are not allowed")
        if w <= 0:
            raise ValueError("weights must be strictly positive")
        cell = self.adj[u].get(v)
        if cell is None:
            cell = [0.0, 0]
            self.adj[u][v] = cell
            self.adj[v][u] = cell
        cell[0] += w
        cell[1] += count

    def remove_pair(self, u: int, v: int) -> None:
        del self.adj[u][v]
        del self.adj[v][u]

    def neighbors(self, v: int):
        return self.adj[v].keys()

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def pair_weight(self, u: int, v: int) -> float:
        cell = self.adj[u].get(v)
        return 0.0 if cell is None else cell[0]

    def pair_count(self, u: int, v: int) -> int:
        cell = self.adj[u].get(v)
        return 0 if cell is None else cell[1]

    def weighted_degree(self, v: int) -> float:
        return sum(cell[0] for cell in self.adj[v].values())

    def multi_edge_count(self) -> int:
        return sum(cell[1] for a in self.adj for cell in a.values()) // 2

    def pair_edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def split(self, k: int) -> "MultiGraph":
        """Copy with every multi-edge split into k equal-weight copies."""
        if k < 1:
            raise ValueError("k must be >= 1")
        g = MultiGraph(self.n)
        for u in range(self.n):
            for v, (w, c) in self.adj[u].items():
                if u < v:
                    g.add_edge(u, v, w, count=c * k)
        return g

    def copy(self) -> "MultiGraph":
        g = MultiGraph(self.n)
        for u in range(self.n):
            for v, (w, c) in self.adj[u].items():
                if u < v:
                    g.add_edge(u, v, w, count=c)
        return g

    def laplacian(self) -> SparseSym:
        """Laplacian of the multi-graph; row sums cancel exactly to zero."""
        rows, cols, wts = [], [], []
        for u in range(self.n):
            for v, (w, _) in self.adj[u].items():
                if u < v:
                    rows.append(u)
                    cols.append(v)
                    wts.append(w)
        return laplacian_from_edges(self.n, np.array(rows, dtype=np.int64),
                                    np.array(cols, dtype=np.int64),
                                    np.array(wts))


def laplacian_of(g: MultiGraph) -> SparseSym:
    return g.laplacian()
