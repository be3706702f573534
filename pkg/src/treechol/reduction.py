"""SDDM-to-Laplacian reduction via one grounded extra vertex.

An SDDM matrix M = L + D (L Laplacian, D the diagonal excess d = M*1) embeds
into a Laplacian one dimension larger by connecting each row i with d[i] > 0
to a new vertex with an edge of weight d[i].  Solving the lifted system with
a right-hand side padded to sum zero and subtracting the extra coordinate
recovers the SDDM solution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sparsesym import (DEFAULT_CLASS_EPS, MatrixKind, NotSDDMError,
                        SparseSym, classify, connected_components)


@dataclass(frozen=True)
class GrembanLift:
    base_n: int
    extra_vertex: int
    lifted: SparseSym


def lift(m: SparseSym, eps: float = DEFAULT_CLASS_EPS) -> GrembanLift:
    """Embed an SDDM (or approximately SDDM) matrix into a Laplacian.

    Rows with zero diagonal excess get no edge to the extra vertex; tiny
    negative excesses (within the classification tolerance) are clamped to
    zero, i.e. the excess is discarded.  The lifted diagonal is recomputed
    from the off-diagonals so the result is an exact Laplacian.
    """
    cls = classify(m, eps)
    if cls.kind == MatrixKind.NOT_SUPPORTED:
        raise NotSDDMError(f"matrix is not SDDM (classified {cls.kind.value}, "
                           f"nearness {cls.nearness:.3g})")
    n = m.n
    d = np.maximum(m.row_sums(), 0.0)
    hooked = np.nonzero(d > 0)[0]
    rows = np.concatenate([m.rows, hooked])
    cols = np.concatenate([m.cols, np.full(hooked.size, n, dtype=np.int64)])
    vals = np.concatenate([m.vals, -d[hooked]])
    # diagonal = negated off-diagonal accumulation in row_sums order, so the
    # lifted row sums cancel exactly and the result is an exact Laplacian
    off = np.zeros(n + 1)
    np.add.at(off, rows, vals)
    np.add.at(off, cols, vals)
    return GrembanLift(n, n, SparseSym(n + 1, rows, cols, vals, -off))


def lift_rhs(lft: GrembanLift, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (lft.base_n,):
        raise ValueError(f"expected right-hand side of length {lft.base_n}")
    return np.concatenate([b, [-b.sum()]])


def recover(lft: GrembanLift, y) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (lft.base_n + 1,):
        raise ValueError(f"expected lifted solution of length {lft.base_n + 1}")
    return y[: lft.base_n] - y[lft.extra_vertex]


def project_onto_image(m: SparseSym, b, labels=None) -> np.ndarray:
    """Project b onto the image of a Laplacian: zero-mean per component."""
    b = np.asarray(b, dtype=np.float64).copy()
    if labels is None:
        labels = connected_components(m)
    for c in np.unique(labels):
        sel = labels == c
        b[sel] -= b[sel].mean()
    return b
