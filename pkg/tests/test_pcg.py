import numpy as np
import pytest

import treechol as tc
from treechol.pcg import BreakdownIndefinite, PcgConfig, SolveStatus
from conftest import random_connected_laplacian


def identity(x):
    return x


def test_identity_system_one_iteration():
    b = np.array([1.0, -2.0, 3.0])
    x, rep = tc.pcg_solve(identity, identity, b)
    assert rep.status == SolveStatus.CONVERGED
    assert rep.n_iter == 1
    assert np.allclose(x, b)


def test_exact_preconditioner_one_iteration(rng):
    a = np.array([[3.0, 1.0], [1.0, 2.0]])
    ainv = np.linalg.inv(a)
    b = rng.standard_normal(2)
    x, rep = tc.pcg_solve(lambda v: a @ v, lambda v: ainv @ v, b)
    assert rep.status == SolveStatus.CONVERGED
    assert rep.n_iter == 1
    assert np.linalg.norm(a @ x - b) <= 1e-10


def test_zero_rhs():
    x, rep = tc.pcg_solve(identity, identity, np.zeros(4))
    assert rep.status == SolveStatus.CONVERGED
    assert rep.n_iter == 0 and np.all(x == 0) and rep.rel_residual == 0.0


def test_unpreconditioned_spd_converges(rng):
    q, _ = np.linalg.qr(rng.standard_normal((20, 20)))
    a = q @ np.diag(rng.random(20) + 0.5) @ q.T
    b = rng.standard_normal(20)
    x, rep = tc.pcg_solve(lambda v: a @ v, identity, b)
    assert rep.status == SolveStatus.CONVERGED
    assert rep.rel_residual <= 1e-8
    assert np.linalg.norm(b - a @ x) / np.linalg.norm(b) <= 1e-8


def test_energy_norm_monotone_decrease(rng):
    q, _ = np.linalg.qr(rng.standard_normal((25, 25)))
    a = q @ np.diag(rng.random(25) * 10 + 0.1) @ q.T
    b = rng.standard_normal(25)
    x_star = np.linalg.solve(a, b)
    errs = []

    def track(xk):
        e = xk - x_star
        errs.append(float(e @ (a @ e)))

    tc.pcg_solve(lambda v: a @ v, identity, b, callback=track)
    errs = np.array(errs)
    assert np.all(errs[1:] <= errs[:-1] * (1 + 1e-10) + 1e-14)


def test_converged_residual_is_true_residual(rng):
    lap = random_connected_laplacian(rng, 50)
    b = tc.gaussian_rhs(lap, 2)
    x, rep = tc.solve(lap, b, variant="ac", seed=0)
    assert rep.status == SolveStatus.CONVERGED
    direct = tc.relative_residual(lambda v: lap.to_csr() @ v, x, b)
    assert rep.rel_residual == pytest.approx(direct, rel=1e-12)
    assert rep.rel_residual <= 1e-8


def test_max_iters_status():
    a = np.diag(np.linspace(0.01, 100, 40))
    b = np.ones(40)
    x, rep = tc.pcg_solve(lambda v: a @ v, identity, b,
                          PcgConfig(tolerance=1e-14, max_iters=3))
    assert rep.status == SolveStatus.MAX_ITERS
    assert rep.n_iter == 3
    assert rep.rel_residual > 1e-14


def test_breakdown_on_indefinite_operator():
    a = np.diag([1.0, -1.0])
    with pytest.raises(BreakdownIndefinite):
        tc.pcg_solve(lambda v: a @ v, identity, np.array([0.0, 1.0]))


def test_breakdown_on_indefinite_preconditioner():
    with pytest.raises(BreakdownIndefinite):
        tc.pcg_solve(identity, lambda v: -v, np.array([1.0, 1.0]))


def test_stagnation_detected(rng):
    # a tolerance below machine precision is unreachable: the residual
    # floors around 1e-16 and the driver must report stagnation, not spin
    q, _ = np.linalg.qr(rng.standard_normal((30, 30)))
    a = q @ np.diag(rng.random(30) + 0.5) @ q.T
    b = rng.standard_normal(30)
    x, rep = tc.pcg_solve(lambda v: a @ v, identity, b,
                          PcgConfig(tolerance=1e-30, max_iters=10_000,
                                    stagnation_window=5,
                                    true_residual_period=10))
    assert rep.status == SolveStatus.STAGNATED
    assert rep.n_iter < 10_000
    assert rep.rel_residual <= 1e-12  # solved to the floor, just not to tol


def test_relative_residual_values(rng):
    a = np.diag([2.0, 4.0])
    x = np.array([0.5, 0.25])
    b = np.array([1.0, 1.0])
    assert tc.relative_residual(lambda v: a @ v, x, b) == 0.0
    assert tc.relative_residual(lambda v: a @ v, np.zeros(2), b) == 1.0
    assert tc.relative_residual(identity, np.zeros(3), np.zeros(3)) == 0.0


def test_relative_residual_kernel_shift_invariance(rng):
    lap = random_connected_laplacian(rng, 15)
    csr = lap.to_csr()
    b = tc.gaussian_rhs(lap, 5)
    x = np.linalg.pinv(lap.to_dense()) @ b
    r0 = tc.relative_residual(lambda v: csr @ v, x, b)
    r1 = tc.relative_residual(lambda v: csr @ v, x + 3.3, b)
    assert r1 == pytest.approx(r0, abs=1e-9)


@pytest.mark.parametrize("factor,band", [
    (0.5, "ok"), (1.0, "ok"), (5.0, "star"), (1e4, "star"),
    (1.001e4, "double-star"), (1e7, "double-star"), (1e8, "inf"),
    (1e12, "inf"),
])
def test_residual_bands(factor, band):
    tol = 1e-8
    assert tc.residual_band(factor * tol, tol) == band


def test_report_total_time_is_sum():
    rep = tc.SolveReport(n=3, nnz=9, t_build=0.5, t_solve=0.25)
    assert rep.t_total == 0.75
