"""MatrixMarket coordinate I/O for symmetric real matrices.

Indices are 1-based on disk (MatrixMarket convention) and 0-based in memory;
scipy handles the conversion.  Complex and pattern fields are rejected with a
diagnostic, as are structurally asymmetric `general` files.
"""

from __future__ import annotations

import numpy as np
import scipy.io
import scipy.sparse as sp

from .sparsesym import SparseSym


class MatrixMarketFormatError(ValueError):
    pass


def read_matrix_market(path) -> SparseSym:
    rows, cols, entries, fmt, field, symmetry = scipy.io.mminfo(path)
    if field not in ("real", "integer"):
        raise MatrixMarketFormatError(
            f"{path}: field '{field}' is not supported; expected a real or "
            "integer matrix")
    if rows != cols:
        raise MatrixMarketFormatError(f"{path}: matrix is not square "
                                      f"({rows}x{cols})")
    if symmetry not in ("symmetric", "general"):
        raise MatrixMarketFormatError(
            f"{path}: symmetry '{symmetry}' is not supported")
    a = scipy.io.mmread(path)  # symmetric storage comes back mirrored
    if fmt == "array":
        return SparseSym.from_dense(np.asarray(a, dtype=np.float64))
    a = sp.coo_matrix(a)
    a.sum_duplicates()
    if symmetry == "general":
        d = a - a.T
        if d.nnz and np.abs(d.data).max() > 1e-13 * max(1.0, np.abs(a.data).max()):
            raise MatrixMarketFormatError(
                f"{path}: general matrix is not symmetric")
    keep = a.row <= a.col
    return SparseSym.from_coo(a.shape[0], a.row[keep], a.col[keep],
                              a.data[keep])


def write_matrix_market(path, m: SparseSym, comment: str = "") -> None:
    """Write one triangle per entry in symmetric coordinate format."""
    keep = m.diag != 0
    didx = np.nonzero(keep)[0]
    i = np.concatenate([m.rows, didx])
    j = np.concatenate([m.cols, didx])
    v = np.concatenate([m.vals, m.diag[didx]])
    # mmwrite expects the lower triangle for symmetric storage
    coo = sp.coo_matrix((v, (np.maximum(i, j), np.minimum(i, j))),
                        shape=(m.n, m.n))
    scipy.io.mmwrite(path, coo, comment=comment, symmetry="symmetric")
