"""Approximate and exact Cholesky factorizations of graph Laplacians.

Two output formats describe the same operator:

  - ``LowerTriFactorization``: columns ``l_v = S(:,v)/sqrt(S(v,v))`` in
    elimination order; the final column per connected component is zero.
  - ``RowOpFactorization``: a stream of two-entry row operations plus a
    diagonal.  Eliminating a degree-k vertex emits k-1 "shift" operations
    (coefficient theta/(1-theta)) and one "attach" operation, and one
    diagonal entry a(last)^2 / d.

Both are materialized from the same elimination trace, so factorizations
with equal seeds agree as operators up to formatting round-off.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import _kernels
from .multigraph import MultiGraph
from .ordering import MinDegreeQueue
from .rng import counter_u01, random_permutation
from .sparsesym import (MatrixKind, NotLaplacianError, SparseSym, classify,
                        connected_components)

UNBOUNDED = None


@dataclass(frozen=True)
class SamplerConfig:
    """Split/merge sampling parameters: (1,1)=ac, (2,2)=ac2, (k,None)=ac-sk."""

    split: int = 1
    merge: int | None = 1
    seed: int = 0
    order: str = "min_degree"

    def __post_init__(self):
        if self.split < 1:
            raise ValueError("split must be >= 1")
        if self.merge is not None and self.merge < 1:
            raise ValueError("merge must be >= 1 or None for unbounded")
        if self.order not in ("min_degree", "random"):
            raise ValueError("order must be 'min_degree' or 'random'")


#: Named presets from the variant study.
VARIANTS = {
    "ac": (1, 1),
    "ac2": (2, 2),
    "ac-s1": (1, None),
    "ac-s2": (2, None),
    "ac-s2m2": (2, 2),
    "ac-s3m3": (3, 3),
}


def parse_variant(name: str, seed: int = 0) -> SamplerConfig:
    """Config for names like ac, ac2, ac-s3, ac-s2m2, ac-random-order."""
    key = name.strip().lower()
    order = "min_degree"
    if key == "ac-random-order":
        return SamplerConfig(1, 1, seed, "random")
    if key in VARIANTS:
        k, l = VARIANTS[key]
        return SamplerConfig(k, l, seed, order)
    if key.startswith("ac-s"):
        body = key[4:]
        if "m" in body:
            ks, ls = body.split("m", 1)
            return SamplerConfig(int(ks), int(ls), seed, order)
        return SamplerConfig(int(body), None, seed, order)
    raise ValueError(f"unknown solver variant '{name}'")


@dataclass
class LowerTriFactorization:
    n: int
    perm: np.ndarray
    col_ptr: np.ndarray
    col_idx: np.ndarray
    col_w: np.ndarray
    col_d: np.ndarray
    labels: np.ndarray
    underflow_count: int = 0
    _low: sp.csc_matrix = field(default=None, repr=False)

    def nnz(self) -> int:
        """Symmetric-matrix convention: both triangles plus the diagonal."""
        return int(2 * self.col_idx.size + np.count_nonzero(self.col_d > 0))

    def lower_matrix(self) -> sp.csc_matrix:
        """The factor as an n x n matrix, lower triangular under perm."""
        if self._low is not None:
            return self._low
        live = self.col_d > 0
        degs = np.diff(self.col_ptr)
        rd = np.sqrt(np.where(live, self.col_d, 1.0))
        cols_of_entry = np.repeat(self.perm, degs)
        rows = np.concatenate([self.perm[live], self.col_idx])
        cols = np.concatenate([self.perm[live], cols_of_entry])
        vals = np.concatenate([rd[live],
                               -self.col_w / np.repeat(rd, degs)])
        self._low = sp.csc_matrix((vals, (rows, cols)),
                                  shape=(self.n, self.n))
        return self._low

    def apply(self, x) -> np.ndarray:
        """(L L^T) x."""
        low = self.lower_matrix()
        return low @ (low.T @ np.asarray(x, dtype=np.float64))


@dataclass
class RowOpFactorization:
    n: int
    perm: np.ndarray
    op_kind: np.ndarray
    op_v: np.ndarray
    op_o: np.ndarray
    op_theta: np.ndarray
    phi: np.ndarray
    labels: np.ndarray
    underflow_count: int = 0
    _label_counts: np.ndarray = field(default=None, repr=False)

    def nnz(self) -> int:
        """Symmetric-matrix convention: both triangles plus the diagonal."""
        return int(2 * self.op_kind.size + np.count_nonzero(self.phi > 0))

    def op_count(self) -> int:
        return int(self.op_kind.size)

    def apply(self, x) -> np.ndarray:
        """(Pi ops) Phi (Pi ops)^T x: the preconditioner as an operator."""
        y = np.array(x, dtype=np.float64, copy=True)
        _kernels.rowop_apply(self.op_kind, self.op_v, self.op_o,
                             self.op_theta, self.phi, y)
        return y

    def project_kernel_out(self, x) -> np.ndarray:
        """Subtract the per-component mean (projection onto the image)."""
        if self._label_counts is None:
            self._label_counts = np.bincount(self.labels).astype(np.float64)
        x = np.asarray(x, dtype=np.float64)
        means = np.bincount(self.labels, weights=x) / self._label_counts
        return x - means[self.labels]

    def solve(self, r) -> np.ndarray:
        return apply_precond_inverse(self, r)


def apply_precond_inverse(f: RowOpFactorization, r) -> np.ndarray:
    """Pseudo-inverse of the factorized operator applied to r.

    Computes Pi L'^{-T} Phi^+ L'^{-1} Pi r where Pi subtracts the mean per
    connected component; runs in O(#ops).  The output is orthogonal to each
    component indicator.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.shape != (f.n,):
        raise ValueError(f"expected right-hand side of length {f.n}")
    y = f.project_kernel_out(r).copy()
    _kernels.rowop_solve(f.op_kind, f.op_v, f.op_o, f.op_theta, f.phi, y)
    return f.project_kernel_out(y)


# ---------------------------------------------------------------------------
# factorization drivers


def _require_laplacian(m: SparseSym):
    cls = classify(m)
    if cls.kind != MatrixKind.LAPLACIAN:
        raise NotLaplacianError(
            f"matrix classified as {cls.kind.value}; factorization needs a "
            "Laplacian (lift SDDM inputs first)")


def _upper_pairs(m: SparseSym):
    w = -m.vals
    if w.size and w.min() <= 0:
        raise NotLaplacianError("Laplacian off-diagonals must be negative")
    return m.rows, m.cols, w


def _factor_trace(m: SparseSym, cfg: SamplerConfig):
    rows, cols, w = _upper_pairs(m)
    order_mode = 1 if cfg.order == "random" else 0
    merge = 0 if cfg.merge is None else cfg.merge
    perm, col_ptr, col_idx, col_w, col_d, stats = _kernels.factorize_kernel(
        m.n, rows, cols, w, cfg.split, merge, cfg.seed, order_mode)
    if stats[1] != 0:
        raise AssertionError("multi-edge count increased during elimination")
    return perm, col_ptr, col_idx, col_w, col_d, int(stats[0])


def approximate_cholesky(m: SparseSym, cfg: SamplerConfig = SamplerConfig()
                         ) -> LowerTriFactorization:
    """Randomized approximate Cholesky factor in lower-triangular form.

    E[L L^T] equals the input; the sampled fill keeps nnz within
    O(split * m log m).  Deterministic given (matrix, cfg).
    """
    _require_laplacian(m)
    perm, col_ptr, col_idx, col_w, col_d, uf = _factor_trace(m, cfg)
    return LowerTriFactorization(m.n, perm, col_ptr, col_idx, col_w, col_d,
                                 connected_components(m), uf)


def approximate_edgewise_cholesky(m: SparseSym,
                                  cfg: SamplerConfig = SamplerConfig()
                                  ) -> RowOpFactorization:
    """Same elimination as approximate_cholesky, row-operation format."""
    _require_laplacian(m)
    perm, col_ptr, col_idx, col_w, col_d, uf = _factor_trace(m, cfg)
    op_kind, op_v, op_o, op_theta, phi = _kernels.build_rowops(
        m.n, perm, col_ptr, col_idx, col_w, col_d)
    return RowOpFactorization(m.n, perm, op_kind, op_v, op_o, op_theta, phi,
                              connected_components(m), uf)


def to_row_ops(f: LowerTriFactorization) -> RowOpFactorization:
    """Convert between the output formats in linear time."""
    op_kind, op_v, op_o, op_theta, phi = _kernels.build_rowops(
        f.n, f.perm, f.col_ptr, f.col_idx, f.col_w, f.col_d)
    return RowOpFactorization(f.n, f.perm, op_kind, op_v, op_o, op_theta, phi,
                              f.labels, f.underflow_count)


def exact_cholesky(m: SparseSym, order=None) -> LowerTriFactorization:
    """Exact Cholesky via clique addition; fill makes this small-n only.

    Eliminating v inserts the full clique w_i w_j / d on its neighbors.
    L L^T reproduces the input exactly up to round-off.
    """
    _require_laplacian(m)
    g = MultiGraph.from_sparse(m)
    n = m.n
    explicit = order is not None
    if explicit:
        order = list(order)
        if sorted(order) != list(range(n)):
            raise ValueError("order must be a permutation of all vertices")
    else:
        queue = MinDegreeQueue([g.degree(v) for v in range(n)])
    perm = np.empty(n, dtype=np.int64)
    col_ptr = np.zeros(n + 1, dtype=np.int64)
    idx_chunks, w_chunks = [], []
    col_d = np.zeros(n)
    for pos in range(n):
        v = order[pos] if explicit else queue.pop()
        perm[pos] = v
        items = [(u, cell[0]) for u, cell in g.adj[v].items()]
        for u, _ in items:
            g.remove_pair(v, u)
            if not explicit:
                queue.update(u, g.degree(u))
        col_ptr[pos + 1] = col_ptr[pos] + len(items)
        if not items:
            continue
        items.sort(key=lambda it: (it[1], it[0]))
        nbrs = [u for u, _ in items]
        ws = [w for _, w in items]
        d = 0.0
        for w in ws:
            d += w
        col_d[pos] = d
        idx_chunks.append(np.array(nbrs, dtype=np.int64))
        w_chunks.append(np.array(ws))
        for t in range(len(nbrs) - 1):
            for q in range(t + 1, len(nbrs)):
                iv, jv = nbrs[t], nbrs[q]
                existed = g.pair_count(iv, jv) > 0
                g.add_edge(iv, jv, ws[t] * ws[q] / d)
                if not existed and not explicit:
                    queue.update(iv, g.degree(iv))
                    queue.update(jv, g.degree(jv))
    col_idx = (np.concatenate(idx_chunks) if idx_chunks
               else np.empty(0, dtype=np.int64))
    col_w = np.concatenate(w_chunks) if w_chunks else np.empty(0)
    return LowerTriFactorization(n, perm, col_ptr, col_idx, col_w, col_d,
                                 connected_components(m))


def reference_factorize(m: SparseSym, cfg: SamplerConfig = SamplerConfig()
                        ) -> LowerTriFactorization:
    """Pure-Python twin of the compiled factorization kernel.

    Exists for auditability: it mirrors the kernel's collection, sorting,
    accumulation and RNG-keying order exactly, and the test suite demands
    bit-identical output from the two paths.
    """
    _require_laplacian(m)
    g = MultiGraph.from_sparse(m, split=cfg.split)
    n = m.n
    random_order = cfg.order == "random"
    if random_order:
        perm_seq = random_permutation(n, cfg.seed)
    else:
        queue = MinDegreeQueue([g.degree(v) for v in range(n)])
    perm = np.empty(n, dtype=np.int64)
    col_ptr = np.zeros(n + 1, dtype=np.int64)
    idx_chunks, w_chunks = [], []
    col_d = np.zeros(n)
    underflow = 0
    for pos in range(n):
        v = perm_seq[pos] if random_order else queue.pop()
        perm[pos] = v
        items = [(u, cell[0], cell[1]) for u, cell in g.adj[v].items()]
        for u, _, _ in items:
            g.remove_pair(v, u)
            if not random_order:
                queue.update(u, g.degree(u))
        col_ptr[pos + 1] = col_ptr[pos]
        if not items:
            continue
        items.sort(key=lambda it: (it[1], it[0]))
        nbrs = [it[0] for it in items]
        ws = [it[1] for it in items]
        counts = [it[2] for it in items]
        deg = len(nbrs)
        d = 0.0
        for w in ws:
            d += w
        if not d > 0.0:
            underflow += 1
            continue
        col_ptr[pos + 1] = col_ptr[pos] + deg
        col_d[pos] = d
        idx_chunks.append(np.array(nbrs, dtype=np.int64))
        w_chunks.append(np.array(ws))
        pfx = [0.0] * (deg + 1)
        for t in range(deg):
            pfx[t + 1] = pfx[t] + ws[t]
        for t in range(deg - 1):
            tc = counts[t] if cfg.merge is None else min(counts[t], cfg.merge)
            wbar = ws[t] / tc
            rw = pfx[deg] - pfx[t + 1]
            wnew = (wbar * rw) / d
            for h in range(tc):
                u01 = counter_u01(cfg.seed, pos, t, h)
                target = pfx[t + 1] + u01 * rw
                lo, hi = t + 1, deg - 1
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if pfx[mid + 1] > target:
                        hi = mid
                    else:
                        lo = mid + 1
                iv, jv = nbrs[t], nbrs[lo]
                existed = g.pair_count(iv, jv) > 0
                g.add_edge(iv, jv, wnew)
                if not existed and not random_order:
                    queue.update(iv, g.degree(iv))
                    queue.update(jv, g.degree(jv))
    col_idx = (np.concatenate(idx_chunks) if idx_chunks
               else np.empty(0, dtype=np.int64))
    col_w = np.concatenate(w_chunks) if w_chunks else np.empty(0)
    return LowerTriFactorization(n, perm, col_ptr, col_idx, col_w, col_d,
                                 connected_components(m), underflow)


def monte_carlo_llt(m: SparseSym, cfg: SamplerConfig, n_seeds: int,
                    seed0: int = 0):
    """Mean and standard error of L L^T entries over seeds seed0..seed0+n-1."""
    rows, cols, w = _upper_pairs(m)
    order_mode = 1 if cfg.order == "random" else 0
    merge = 0 if cfg.merge is None else cfg.merge
    seeds = np.arange(seed0, seed0 + n_seeds, dtype=np.int64)
    acc, acc2 = _kernels.mc_mean_llt(m.n, rows, cols, w, cfg.split, merge,
                                     seeds, order_mode)
    mean = acc / n_seeds
    var = np.maximum(acc2 / n_seeds - mean ** 2, 0.0)
    stderr = np.sqrt(var / n_seeds)
    return mean, stderr


# ---------------------------------------------------------------------------
# serialization

_FORMAT_VERSION = 1


def save_factorization(path, f: RowOpFactorization) -> None:
    """Versioned binary container; layout in docs/factorization_format.md."""
    np.savez_compressed(
        path, format_version=np.int64(_FORMAT_VERSION), n=np.int64(f.n),
        perm=f.perm, op_kind=f.op_kind, op_v=f.op_v, op_o=f.op_o,
        op_theta=f.op_theta, phi=f.phi, labels=f.labels,
        underflow_count=np.int64(f.underflow_count))


def load_factorization(path) -> RowOpFactorization:
    with np.load(path) as z:
        version = int(z["format_version"])
        if version != _FORMAT_VERSION:
            raise ValueError(f"unsupported factorization format version "
                             f"{version} (expected {_FORMAT_VERSION})")
        return RowOpFactorization(
            int(z["n"]), z["perm"], z["op_kind"], z["op_v"], z["op_o"],
            z["op_theta"], z["phi"], z["labels"], int(z["underflow_count"]))
