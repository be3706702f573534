import numpy as np
import pytest

import treechol as tc
from conftest import random_sddm


def test_lift_1x1():
    m = tc.SparseSym.from_dense([[2.0]])
    lft = tc.lift(m)
    assert lft.base_n == 1 and lft.extra_vertex == 1
    assert np.array_equal(lft.lifted.to_dense(), [[2.0, -2.0], [-2.0, 2.0]])


def test_lift_of_laplacian_isolates_extra_vertex():
    m = tc.SparseSym.from_dense([[1.0, -1.0], [-1.0, 1.0]])
    lft = tc.lift(m)
    d = lft.lifted.to_dense()
    assert np.array_equal(d[:2, :2], m.to_dense())
    assert np.all(d[2] == 0) and np.all(d[:, 2] == 0)


def test_lift_excess_becomes_edges():
    m = tc.SparseSym.from_dense([[3.0, -1.0], [-1.0, 2.0]])
    lft = tc.lift(m)
    d = lft.lifted.to_dense()
    # d = M*1 = (2, 1): edges (0,extra,2) and (1,extra,1)
    assert d[0, 2] == -2.0 and d[1, 2] == -1.0 and d[0, 1] == -1.0
    assert np.abs(lft.lifted.row_sums()).max() == 0.0
    assert tc.classify(lft.lifted).kind == tc.MatrixKind.LAPLACIAN


def test_lift_rejects_non_sddm():
    m = tc.SparseSym.from_dense([[1.0, -2.0], [-2.0, 1.0]])
    with pytest.raises(tc.NotSDDMError):
        tc.lift(m)


@pytest.mark.parametrize("b,expect", [
    ([1.0], [1.0, -1.0]),
    ([0.5, -0.5], [0.5, -0.5, 0.0]),
    ([3.0, 4.0], [3.0, 4.0, -7.0]),
])
def test_lift_rhs_pads_to_zero_sum(b, expect):
    m = tc.SparseSym.from_dense(np.eye(len(b)) * 2.0)
    lft = tc.lift(m)
    assert np.array_equal(tc.lift_rhs(lft, b), expect)


def test_lift_rhs_sum_bound(rng):
    m = random_sddm(rng, 20)
    lft = tc.lift(m)
    b = rng.standard_normal(20)
    bhat = tc.lift_rhs(lft, b)
    assert abs(bhat.sum()) <= 21 * np.finfo(float).eps * np.abs(b).sum()


def test_lift_rhs_dimension_mismatch():
    lft = tc.lift(tc.SparseSym.from_dense([[2.0]]))
    with pytest.raises(ValueError):
        tc.lift_rhs(lft, [1.0, 2.0])


def test_recover_1x1_matches_dense_solve():
    m = tc.SparseSym.from_dense([[2.0]])
    lft = tc.lift(m)
    # y solves the lifted system for bhat = (1, -1), mean zero
    y = np.array([0.25, -0.25])
    assert np.allclose(tc.recover(lft, y), [0.5])


def test_recover_constant_is_zero():
    m = tc.SparseSym.from_dense([[3.0, -1.0], [-1.0, 2.0]])
    lft = tc.lift(m)
    assert np.array_equal(tc.recover(lft, np.full(3, 7.5)), [0.0, 0.0])


def test_lift_solve_recover_matches_dense_inverse(rng):
    for _ in range(10):
        m = random_sddm(rng, 5)
        lft = tc.lift(m)
        b = rng.standard_normal(5)
        bhat = tc.lift_rhs(lft, b)
        lap = lft.lifted.to_dense()
        y = np.linalg.pinv(lap) @ bhat
        x = tc.recover(lft, y)
        x_dense = np.linalg.solve(m.to_dense(), b)
        assert np.linalg.norm(x - x_dense) <= 1e-10 * np.linalg.norm(x_dense)


def test_project_onto_image_zero_means():
    m = tc.laplacian_from_edges(4, [0, 2], [1, 3], [1.0, 1.0])
    b = np.array([1.0, 2.0, 3.0, 5.0])
    p = tc.project_onto_image(m, b)
    lab = tc.connected_components(m)
    for c in np.unique(lab):
        assert abs(p[lab == c].sum()) < 1e-14
