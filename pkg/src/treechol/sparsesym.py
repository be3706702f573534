"""Compressed symmetric sparse matrices and SDDM/Laplacian classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc

#: Default classification tolerance: ten times the double-precision epsilon.
DEFAULT_CLASS_EPS = 10.0 * np.finfo(np.float64).eps


class MatrixKind(enum.Enum):
    LAPLACIAN = "laplacian"
    SDDM = "sddm"
    APPROX_SDDM = "approx_sddm"
    NOT_SUPPORTED = "not_supported"


@dataclass(frozen=True)
class MatrixClass:
    kind: MatrixKind
    #: max |rowsum/diag| over rows with negative row sums (0 for exact classes)
    nearness: float = 0.0


class NotSDDMError(ValueError):
    pass


class NotLaplacianError(ValueError):
    pass


class SparseSym:
    """Symmetric sparse matrix with one stored direction per off-diagonal.

    Off-diagonals are kept as unordered pairs (i < j, value); the diagonal is
    a dense vector.  Duplicate input pairs are summed at construction and
    explicit zeros are dropped, so MatrixMarket files with repeated entries
    load cleanly.  Instances are immutable after construction.
    """

    __slots__ = ("n", "rows", "cols", "vals", "diag", "_csr")

    def __init__(self, n, rows, cols, vals, diag):
        self.n = int(n)
        self.rows = np.asarray(rows, dtype=np.int64)
        self.cols = np.asarray(cols, dtype=np.int64)
        self.vals = np.asarray(vals, dtype=np.float64)
        self.diag = np.asarray(diag, dtype=np.float64)
        if self.diag.shape != (self.n,):
            raise ValueError("diag must have length n")
        if not (self.rows < self.cols).all():
            raise ValueError("entries must be canonical (i < j)")
        self._csr = None

    # -- construction ------------------------------------------------------

    @classmethod
    def from_coo(cls, n, rows, cols, vals) -> "SparseSym":
        """Build from triplets; (i, j) and (j, i) name the same entry.

        Diagonal triplets accumulate into the diagonal.  Duplicates are
        summed, zero off-diagonals dropped.
        """
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        vals = np.asarray(vals, dtype=np.float64)
        if rows.shape != cols.shape or rows.shape != vals.shape:
            raise ValueError("rows, cols, vals must have equal length")
        if rows.size and (rows.min() < 0 or cols.min() < 0 or
                          rows.max() >= n or cols.max() >= n):
            raise ValueError("index out of range")
        on_diag = rows == cols
        diag = np.zeros(n, dtype=np.float64)
        np.add.at(diag, rows[on_diag], vals[on_diag])
        i = np.minimum(rows[~on_diag], cols[~on_diag])
        j = np.maximum(rows[~on_diag], cols[~on_diag])
        v = vals[~on_diag]
        if i.size:
            coo = sp.coo_matrix((v, (i, j)), shape=(n, n))
            coo.sum_duplicates()
            coo.eliminate_zeros()
            i, j, v = coo.row.astype(np.int64), coo.col.astype(np.int64), coo.data
        return cls(n, i, j, v, diag)

    @classmethod
    def from_dense(cls, a) -> "SparseSym":
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        if not np.allclose(a, a.T, rtol=0, atol=0):
            raise ValueError("matrix is not symmetric")
        n = a.shape[0]
        i, j = np.nonzero(np.triu(a, k=1))
        return cls(n, i, j, a[i, j], np.diag(a).copy())

    # -- views -------------------------------------------------------------

    def to_dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.rows, self.cols] = self.vals
        a += a.T
        a[np.arange(self.n), np.arange(self.n)] = self.diag
        return a

    def to_csr(self) -> sp.csr_matrix:
        if self._csr is None:
            i = np.concatenate([self.rows, self.cols, np.arange(self.n)])
            j = np.concatenate([self.cols, self.rows, np.arange(self.n)])
            v = np.concatenate([self.vals, self.vals, self.diag])
            self._csr = sp.csr_matrix((v, (i, j)), shape=(self.n, self.n))
        return self._csr

    def matvec(self, x) -> np.ndarray:
        return self.to_csr() @ x

    def nnz(self) -> int:
        """Stored non-zero count of the full symmetric matrix."""
        return 2 * self.vals.size + int(np.count_nonzero(self.diag))

    def row_sums(self) -> np.ndarray:
        # accumulate off-diagonals separately, then add the diagonal once:
        # a diagonal built by laplacian_from_edges cancels exactly
        off = np.zeros(self.n)
        np.add.at(off, self.rows, self.vals)
        np.add.at(off, self.cols, self.vals)
        return self.diag + off

    def offdiag_degrees(self) -> np.ndarray:
        """Number of off-diagonal neighbors per row."""
        d = np.zeros(self.n, dtype=np.int64)
        np.add.at(d, self.rows, 1)
        np.add.at(d, self.cols, 1)
        return d

    def __repr__(self):
        return f"SparseSym(n={self.n}, offdiag_pairs={self.vals.size})"


def laplacian_from_edges(n, rows, cols, weights) -> SparseSym:
    """Laplacian with off-diagonal -w and diagonal = weighted degree.

    The diagonal is accumulated in the same element order row_sums() uses,
    so row sums cancel to exactly zero in floating point.
    """
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.size and weights.min() <= 0:
        raise ValueError("edge weights must be strictly positive")
    if rows.size and (rows == cols).any():
        raise ValueError("self-loops are not allowed")
    diag = np.zeros(n)
    np.add.at(diag, rows, weights)
    np.add.at(diag, cols, weights)
    return SparseSym(n, rows, cols, -weights, diag)


def classify(m: SparseSym, eps: float = DEFAULT_CLASS_EPS) -> MatrixClass:
    """Classify a symmetric matrix as Laplacian / SDDM / approximately SDDM.

    Rows with non-negative sums are the SDDM family; if every such sum is at
    most eps * diag the matrix is treated as an (approximate) Laplacian.
    Rows with negative sums are tolerated only within eps * diag, and the
    worst violation ratio is reported as the nearness.  Positive
    off-diagonals are out of scope.
    """
    if m.vals.size and m.vals.max() > 0:
        return MatrixClass(MatrixKind.NOT_SUPPORTED)
    s = m.row_sums()
    tol = eps * np.abs(m.diag)
    neg = s < 0
    if not neg.any():
        if (s <= tol).all():
            return MatrixClass(MatrixKind.LAPLACIAN)
        return MatrixClass(MatrixKind.SDDM)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(m.diag != 0, np.abs(s) / np.abs(m.diag), np.inf)
    nearness = float(ratio[neg].max())
    if (ratio[neg] <= eps).all():
        return MatrixClass(MatrixKind.APPROX_SDDM, nearness)
    return MatrixClass(MatrixKind.NOT_SUPPORTED, nearness)


def connected_components(m) -> np.ndarray:
    """Component labels for a SparseSym or MultiGraph; equal label == connected."""
    # local import: multigraph depends on this module
    from .multigraph import MultiGraph

    if isinstance(m, MultiGraph):
        m = m.laplacian()
    n = m.n
    adj = sp.csr_matrix(
        (np.ones(2 * m.rows.size),
         (np.concatenate([m.rows, m.cols]), np.concatenate([m.cols, m.rows]))),
        shape=(n, n),
    )
    _, labels = _cc(adj, directed=False)
    return labels.astype(np.int64)
