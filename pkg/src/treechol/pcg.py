"""Preconditioned conjugate gradient with residual confirmation.

The recursive residual tracks convergence cheaply; every tentative
convergence (and every ``true_residual_period`` iterations) the true
residual ||b - Ax|| / ||b|| is recomputed, and only a confirmed value stops
the iteration.  Stagnation is declared when the best confirmed residual
stops improving, mirroring MATLAB-style pcg behavior with documented
constants.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass

import numpy as np


class SolveStatus(enum.Enum):
    CONVERGED = "converged"
    STAGNATED = "stagnated"
    MAX_ITERS = "max_iters"


class BreakdownIndefinite(ArithmeticError):
    """p^T A p <= 0 or r^T M^{-1} r < 0: operator or preconditioner not PSD."""


@dataclass(frozen=True)
class PcgConfig:
    tolerance: float = 1e-8
    max_iters: int = 1000
    stagnation_window: int = 50
    stagnation_improvement: float = 1e-3
    true_residual_period: int = 100

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SolveReport:
    n: int = 0
    nnz: int = 0
    t_build: float = 0.0
    t_solve: float = 0.0
    n_iter: int = 0
    rel_residual: float = 0.0
    status: SolveStatus = SolveStatus.CONVERGED

    @property
    def t_total(self) -> float:
        return self.t_build + self.t_solve


def relative_residual(apply_a, x, b) -> float:
    """||b - A x||_2 / ||b||_2; zero b with zero x counts as solved."""
    b = np.asarray(b, dtype=np.float64)
    r = b - apply_a(np.asarray(x, dtype=np.float64))
    bn = np.linalg.norm(b)
    rn = np.linalg.norm(r)
    if bn == 0.0:
        return 0.0 if rn == 0.0 else np.inf
    return float(rn / bn)


def pcg_solve(apply_a, apply_minv, b, cfg: PcgConfig = PcgConfig(),
              callback=None):
    """Solve A x = b with preconditioner M^{-1}; A, M^{-1} symmetric PSD.

    Returns (x, report).  The reported relative residual is always a freshly
    recomputed true residual, never the recursive estimate.
    """
    b = np.asarray(b, dtype=np.float64)
    n = b.size
    report = SolveReport(n=n)
    t0 = time.perf_counter()
    bnorm = np.linalg.norm(b)
    x = np.zeros(n)
    if bnorm == 0.0:
        report.t_solve = time.perf_counter() - t0
        return x, report

    r = b.copy()
    z = apply_minv(r)
    rz = float(r @ z)
    if rz < 0.0:
        raise BreakdownIndefinite("r^T M^{-1} r < 0")
    p = z.copy()

    best_true = np.inf
    checks_since_improvement = 0
    status = SolveStatus.MAX_ITERS
    it = 0
    eps = np.finfo(np.float64).eps

    while it < cfg.max_iters:
        it += 1
        ap = apply_a(p)
        pap = float(p @ ap)
        if pap <= 0.0:
            raise BreakdownIndefinite("p^T A p <= 0")
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        if callback is not None:
            callback(x)
        rel_rec = np.linalg.norm(r) / bnorm

        if np.linalg.norm(alpha * p) <= eps * np.linalg.norm(x):
            report.rel_residual = relative_residual(apply_a, x, b)
            status = (SolveStatus.CONVERGED
                      if report.rel_residual <= cfg.tolerance
                      else SolveStatus.STAGNATED)
            break

        if rel_rec <= cfg.tolerance or it % cfg.true_residual_period == 0:
            true_rel = relative_residual(apply_a, x, b)
            if true_rel <= cfg.tolerance:
                report.rel_residual = true_rel
                status = SolveStatus.CONVERGED
                break
            if true_rel < best_true * (1.0 - cfg.stagnation_improvement):
                best_true = true_rel
                checks_since_improvement = 0
            else:
                checks_since_improvement += 1
                if checks_since_improvement >= cfg.stagnation_window:
                    report.rel_residual = true_rel
                    status = SolveStatus.STAGNATED
                    break

        z = apply_minv(r)
        rz_new = float(r @ z)
        if rz_new < 0.0:
            raise BreakdownIndefinite("r^T M^{-1} r < 0")
        beta = rz_new / rz
        rz = rz_new
        p = z + beta * p
    else:
        report.rel_residual = relative_residual(apply_a, x, b)

    report.n_iter = it
    report.status = status
    report.t_solve = time.perf_counter() - t0
    return x, report


def residual_band(rel_residual: float, tolerance: float) -> str:
    """Reporting bands: ok / star / double-star / inf, by excess factor."""
    if rel_residual <= tolerance:
        return "ok"
    factor = rel_residual / tolerance
    if factor <= 1e4:
        return "star"
    if factor < 1e8:
        return "double-star"
    return "inf"
