import numpy as np
import pytest
from scipy.optimize import linprog

from qgt.simplex import simplex_solve


def test_small_known_optimum():
    # min -x - y, x + 2y <= 4, x <= 3 -> corner (3, 0.5)
    res = simplex_solve([-1.0, -1.0], A_ub=[[1, 2], [1, 0]], b_ub=[4, 3])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-3.5)
    assert res.x == pytest.approx([3.0, 0.5])


def test_equality_with_bound():
    res = simplex_solve([1.0, 2.0], A_ub=[[1, 0]], b_ub=[0.7], A_eq=[[1, 1]], b_eq=[1.0])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.3)
    assert res.x == pytest.approx([0.7, 0.3])


def test_infeasible():
    res = simplex_solve([1.0, 1.0], A_ub=[[1, 1]], b_ub=[0.5], A_eq=[[1, 1]], b_eq=[1.0])
    assert res.status == "infeasible"


def test_unbounded():
    res = simplex_solve([-1.0, 0.0], A_ub=[[0, 1]], b_ub=[1.0])
    assert res.status == "unbounded"


def test_negative_rhs_rows():
    # -x1 - x2 <= -1 is x1 + x2 >= 1; needs the sign flip and an artificial
    res = simplex_solve([1.0, 2.0], A_ub=[[-1, -1]], b_ub=[-1.0])
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0)
    assert res.x == pytest.approx([1.0, 0.0])


def test_redundant_equalities_keep_artificial_basis_inert():
    res = simplex_solve(
        [1.0, 1.0],
        A_eq=[[1, 1], [1, 1], [2, 2]],
        b_eq=[1.0, 1.0, 2.0],
    )
    assert res.status == "optimal"
    assert res.objective == pytest.approx(1.0)


def test_degenerate_vertex():
    # three constraints meet at the optimum corner (1, 0)
    res = simplex_solve(
        [-1.0, -1.0],
        A_ub=[[1, 0], [1, 1], [1, 2]],
        b_ub=[1.0, 1.0, 1.0],
    )
    assert res.status == "optimal"
    assert res.objective == pytest.approx(-1.0)


def test_matches_scipy_on_random_instances():
    rng = np.random.default_rng(2024)
    statuses = {"optimal": 0, "infeasible": 0, "unbounded": 0}
    for trial in range(200):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, 9))
        c = rng.normal(size=n).round(3)
        A = rng.normal(size=(m, n)).round(3)
        b = rng.normal(loc=0.5, size=m).round(3)
        use_eq = trial % 3 == 0
        A_eq = np.ones((1, n)) if use_eq else None
        b_eq = [1.0] if use_eq else None

        mine = simplex_solve(c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq)
        ref = linprog(c, A_ub=A, b_ub=b, A_eq=A_eq, b_eq=b_eq, method="highs")

        if ref.status == 0:
            assert mine.status == "optimal", (trial, mine.status)
            assert mine.objective == pytest.approx(ref.fun, abs=1e-7)
            x = mine.x
            assert (x >= -1e-9).all()
            assert (A @ x <= b + 1e-7).all()
            if use_eq:
                assert x.sum() == pytest.approx(1.0, abs=1e-8)
        elif ref.status == 2:
            assert mine.status == "infeasible", trial
        elif ref.status == 3:
            assert mine.status == "unbounded", trial
        statuses[mine.status] += 1
    # the generator must actually exercise every branch
    assert min(statuses.values()) > 0, statuses


def test_requires_constraints():
    with pytest.raises(ValueError):
        simplex_solve([1.0])
