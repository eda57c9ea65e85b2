import math

import numpy as np
import pytest

import logcvx.lpsolve as lps
from logcvx.errors import NumericBreakdown, TargetOutsideHull
from logcvx.generators import SplitMix64

INF = math.inf


def maximize(obj, lhs, rhs, nonneg=None):
    return lps.solve(lps.DenseLP.maximize(obj, lhs, rhs, nonneg))


def test_simple_nonneg():
    # max x + y  s.t.  x <= 1, y <= 2, x,y >= 0
    sol = maximize([1, 1], [[1, 0], [0, 1]], [1, 2], [True, True])
    assert sol.status == lps.OPTIMAL
    assert sol.optimum == pytest.approx(3.0, abs=1e-12)
    assert np.allclose(sol.point, [1, 2])
    assert sol.active_rows == (0, 1)


def test_free_variables():
    # max x  s.t.  x <= 5, -x <= 5  (x free, optimum at x = 5)
    sol = maximize([1.0], [[1.0], [-1.0]], [5.0, 5.0])
    assert sol.status == lps.OPTIMAL
    assert sol.optimum == pytest.approx(5.0, abs=1e-12)
    # negative optimum needs the negative split of the free variable
    sol = maximize([-1.0], [[-1.0]], [-2.0])
    assert sol.optimum == pytest.approx(-2.0, abs=1e-12)
    assert sol.point[0] == pytest.approx(2.0, abs=1e-12)


def test_unbounded():
    sol = maximize([1, 0], [[0, 1]], [1], [True, True])
    assert sol.status == lps.UNBOUNDED
    assert math.isinf(sol.optimum)


def test_infeasible():
    # x >= 0 and x <= -1 cannot hold
    sol = maximize([1.0], [[1.0]], [-1.0], [True])
    assert sol.status == lps.INFEASIBLE
    assert math.isnan(sol.optimum)


def test_negative_rhs_needs_phase_one():
    # max -x - y  s.t.  -x - y <= -4, x <= 10, y <= 10, x,y >= 0
    sol = maximize([-1, -1], [[-1, -1], [1, 0], [0, 1]], [-4, 10, 10],
                   [True, True])
    assert sol.status == lps.OPTIMAL
    assert sol.optimum == pytest.approx(-4.0, abs=1e-10)


def test_infinite_rhs_row_is_dropped():
    sol = maximize([1.0], [[1.0], [1.0]], [INF, 3.0], [True])
    assert sol.status == lps.OPTIMAL
    assert sol.optimum == pytest.approx(3.0)


def test_minus_inf_rhs_is_infeasible():
    sol = maximize([1.0], [[1.0]], [-INF], [True])
    assert sol.status == lps.INFEASIBLE


def test_degenerate_vertex_terminates():
    # many redundant constraints through one vertex; Bland's rule must not cycle
    lhs = [[1, 0], [0, 1], [1, 1], [2, 1], [1, 2], [3, 1], [1, 3]]
    rhs = [1, 1, 2, 3, 3, 4, 4]
    sol = maximize([1, 1], lhs, rhs, [True, True])
    assert sol.status == lps.OPTIMAL
    assert sol.optimum == pytest.approx(2.0, abs=1e-10)


def test_active_rows_are_tight():
    lhs = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])
    rhs = np.array([2.0, 2.0, 3.0])
    sol = maximize([0, 1], lhs, rhs, [True, True])
    for r in sol.active_rows:
        assert lhs[r] @ sol.point == pytest.approx(rhs[r], abs=1e-9)


def test_validation_rejects_bad_shapes():
    with pytest.raises(ValueError):
        lps.DenseLP.maximize([1, 2], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        lps.DenseLP.maximize([np.nan], [[1.0]], [1.0])
    with pytest.raises(ValueError):
        lps.DenseLP.maximize([1.0], [[np.inf]], [1.0])


def test_too_many_variables():
    n = lps.MAX_VARS + 1
    with pytest.raises(ValueError):
        lps.DenseLP.maximize(np.ones(n), np.ones((1, n)), [1.0])


def test_brute_force_1d_example():
    pts = [((0,), 0.0), ((1,), 2.0), ((2,), 1.0), ((3,), 6.0)]
    assert lps.brute_force_envelope(pts, (1,)) == pytest.approx(0.5, abs=1e-12)
    assert lps.brute_force_envelope(pts, (2,)) == pytest.approx(1.0, abs=1e-12)


def test_brute_force_ignores_infinite_points():
    pts = [((0,), 0.0), ((1,), INF), ((2,), 1.0)]
    assert lps.brute_force_envelope(pts, (1,)) == pytest.approx(0.5, abs=1e-12)


def test_brute_force_outside_hull():
    pts = [((0,), 0.0), ((1,), 2.0), ((2,), INF)]
    with pytest.raises(TargetOutsideHull):
        lps.brute_force_envelope(pts, (2,))


def test_brute_force_no_finite_points():
    with pytest.raises(TargetOutsideHull):
        lps.brute_force_envelope([((0,), INF)], (0,))


def test_brute_force_single_point():
    assert lps.brute_force_envelope([((2, 3), 5.0)], (2, 3)) == pytest.approx(5.0)


def test_brute_force_collinear_2d():
    # all abscissae on one line: every 3-point determinant vanishes, the
    # least-squares fallback must still combine endpoints
    pts = [((0, 0), 0.0), ((1, 1), 4.0), ((2, 2), 2.0)]
    v = lps.brute_force_envelope(pts, (1, 1))
    assert v == pytest.approx(1.0, abs=1e-9)


def test_brute_force_2d_square():
    pts = [((0, 0), 0.0), ((2, 0), 8.0), ((0, 2), 8.0), ((1, 1), 15.0),
           ((2, 2), 80.0), ((1, 0), 3.0), ((0, 1), 3.0), ((2, 1), 35.0),
           ((1, 2), 35.0)]
    assert lps.brute_force_envelope(pts, (1, 1)) == pytest.approx(8.0, abs=1e-12)


def test_brute_force_matches_lp_on_random_grids():
    rng = SplitMix64(99)
    for trial in range(25):
        n = 3 + rng.next_u64() % 6
        vals = np.array([4.0 * rng.random() for _ in range(n + 1)])
        vals[0] = 0.0
        pts = [((p,), float(v)) for p, v in enumerate(vals)]
        lhs = np.column_stack([np.arange(n + 1, dtype=float), np.ones(n + 1)])
        for target in range(n + 1):
            sol = maximize([float(target), 1.0], lhs, vals)
            bf = lps.brute_force_envelope(pts, (target,))
            assert sol.status == lps.OPTIMAL
            assert bf == pytest.approx(sol.optimum, abs=1e-8)


def test_equilibration_retry_on_skewed_scales():
    # badly scaled but solvable; success either directly or via the rescaled retry
    lhs = np.array([[1e-9, 0.0], [0.0, 1e9]])
    rhs = np.array([1e-9, 1e9])
    sol = maximize([1.0, 1.0], lhs, rhs, [True, True])
    assert sol.status == lps.OPTIMAL
    assert sol.optimum == pytest.approx(2.0, rel=1e-6)
