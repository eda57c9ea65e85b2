"""Supporting-hyperplane minorant in d dimensions: LP route, dual sampling,
slope ranges, face restriction and the truncation stability probe."""
import math

import numpy as np
import pytest

from logcvx import (EXP, LOG, AllInfinite, DimensionMismatch, EmptyKGrid,
                    GridMismatch, GridValidationError, KGridSpec, OutOfRange,
                    ScaleMismatch, SequenceGrid, as_log_grid, axis_slope_range,
                    boundary_restriction, convex_random_grid, dual_value,
                    envelope1d, factorial_grid, h_of_k, minorant_lp,
                    notconvex_grid, quotient_range, random_grid,
                    stability_probe)
from logcvx.core import index_array

REF = SequenceGrid((3,), [0.0, 2.0, 1.0, 6.0], LOG)


def lattice(box):
    return [tuple(r.tolist()) for r in index_array(box)]


# ---------------------------------------------------------------- h_of_k


def test_h_of_k_picks_lowest_gap_and_reports_touching():
    plane = h_of_k(REF, [0.5])
    assert plane.h == pytest.approx(0.0)
    assert plane.touching == ((0,), (2,))
    steep = h_of_k(REF, [5.0])
    assert steep.h == pytest.approx(-9.0)
    assert steep.touching == ((2,), (3,))


def test_h_of_k_ignores_infinite_entries():
    g = SequenceGrid((2,), [0.0, math.inf, 4.0], LOG)
    plane = h_of_k(g, [1.0])
    assert plane.h == pytest.approx(0.0)
    assert plane.touching == ((0,),)


def test_h_of_k_input_guards():
    with pytest.raises(DimensionMismatch):
        h_of_k(REF, [1.0, 2.0])
    with pytest.raises(ScaleMismatch):
        h_of_k(SequenceGrid((1,), [1.0, 2.0], EXP), [1.0])
    all_inf = SequenceGrid((1,), [math.inf, math.inf], LOG)
    with pytest.raises(AllInfinite):
        h_of_k(all_inf, [0.0])


# ------------------------------------------------------------ slope ranges


def test_quotient_range_reference():
    assert quotient_range(REF) == pytest.approx((0.5, 2.0))


def test_axis_slope_range_reference():
    # pairwise quotients include (1-2)/1 = -1 and (6-1)/1 = 5
    assert axis_slope_range(REF) == pytest.approx((-1.0, 5.0))


def test_axis_slope_range_covers_factorial_top_slope():
    g = as_log_grid(factorial_grid(8))
    lo, hi = axis_slope_range(g)
    assert lo == pytest.approx(0.0)
    assert hi == pytest.approx(math.log(8.0))
    # the origin-anchored range misses it
    assert quotient_range(g)[1] < hi


def test_axis_slope_range_all_infinite_is_degenerate():
    g = SequenceGrid((2,), [0.0, math.inf, math.inf], LOG)
    assert axis_slope_range(g) == (0.0, 0.0)


def test_axis_slope_range_contains_1d_segment_slopes():
    # a segment joins two contacts, so its slope is literally one of the
    # pairwise quotients the range enumerates
    for seed in range(20):
        g = random_grid((8,), seed=seed)
        lo, hi = axis_slope_range(g)
        poly = envelope1d.sweep(g)
        for seg in poly.segments:
            assert lo - 1e-12 <= seg.slope <= hi + 1e-12


def test_dual_on_default_range_is_step_accurate_in_1d():
    # optimal slopes live inside axis_slope_range, so a step-s grid loses at
    # most s * N against the exact minorant
    for seed in range(15):
        g = random_grid((6,), seed=seed + 300)
        res = minorant_lp(g)
        spec = KGridSpec.from_grid(g, step=0.25)
        for alpha in lattice(g.box):
            dv = dual_value(g, [float(alpha[0])], spec)
            exact = res.minorant.value(alpha)
            assert dv.value >= exact - 0.25 * g.box[0] - 1e-9


# ---------------------------------------------------------------- k grids


def test_kgrid_axis_samples_and_product():
    spec = KGridSpec(0.0, 1.0, 0.25)
    assert np.allclose(spec.axis_samples(), [0.0, 0.25, 0.5, 0.75, 1.0])
    pts = spec.samples(2)
    assert pts.shape == (25, 2)
    assert tuple(pts[0]) == (0.0, 0.0)
    assert tuple(pts[-1]) == (1.0, 1.0)


def test_kgrid_rejects_bad_ranges():
    with pytest.raises(EmptyKGrid):
        KGridSpec(1.0, 0.0, 0.25).axis_samples()
    with pytest.raises(EmptyKGrid):
        KGridSpec(0.0, 1.0, 0.0).axis_samples()


def test_kgrid_from_grid_uses_axis_slopes():
    spec = KGridSpec.from_grid(REF)
    assert (spec.lo, spec.hi) == pytest.approx((-1.0, 5.0))
    assert spec.step == 0.25


# ------------------------------------------------------------- dual route


def test_dual_value_at_origin_recovers_origin_value():
    for seed in range(10):
        g = random_grid((4,), seed=seed)
        dv = dual_value(g, [0.0])
        assert dv.value == pytest.approx(g.flat[0], abs=1e-12)


def test_dual_value_notconvex_center():
    g = as_log_grid(notconvex_grid((2, 2)))
    dv = dual_value(g, [1.0, 1.0], KGridSpec(0.0, 8.0, 0.5))
    assert dv.value == pytest.approx(8.0, abs=1e-12)
    assert dv.k == (5.0, 5.0)


def test_dual_value_never_exceeds_lp_minorant():
    for seed in range(15):
        g = random_grid((3, 3), seed=seed + 100)
        res = minorant_lp(g)
        for alpha in lattice(g.box):
            dv = dual_value(g, [float(c) for c in alpha])
            assert dv.value <= res.minorant.value(alpha) + 1e-9


def test_dual_value_input_guards():
    with pytest.raises(OutOfRange):
        dual_value(REF, [4.0])
    with pytest.raises(OutOfRange):
        dual_value(REF, [-0.5])
    with pytest.raises(DimensionMismatch):
        dual_value(REF, [1.0, 1.0])


# ---------------------------------------------------------------- LP route


def test_minorant_lp_reference_matches_sweep():
    res = minorant_lp(REF)
    assert np.allclose(res.minorant.values, [0.0, 0.5, 1.0, 6.0])
    assert res.contact_set == ((0,), (2,), (3,))
    assert res.boundary_affected == ((3,),)


def test_minorant_lp_notconvex_drops_only_the_center():
    g = as_log_grid(notconvex_grid((2, 2)))
    res = minorant_lp(g)
    expect = np.array([[0.0, 3.0, 8.0], [3.0, 8.0, 35.0], [8.0, 35.0, 80.0]])
    assert np.allclose(res.minorant.values, expect, atol=1e-8)
    assert (1, 1) not in res.contact_set
    assert len(res.contact_set) == 8


def test_minorant_lp_fixed_point_on_convex_data():
    for seed in range(10):
        g = convex_random_grid((3, 3), seed=seed)
        res = minorant_lp(g)
        assert np.allclose(res.minorant.values, g.values, atol=1e-8)
        assert set(res.contact_set) == set(lattice(g.box))


def test_minorant_lp_certificates_are_valid_planes():
    for seed in range(10):
        g = random_grid((4, 3), seed=seed + 7)
        res = minorant_lp(g)
        a = g.values
        for alpha, plane in res.certificates.items():
            k = np.asarray(plane.k)
            val = float(k @ np.asarray(alpha)) + plane.h
            assert val == pytest.approx(res.minorant.value(alpha), abs=1e-8)
            for beta in lattice(g.box):
                bound = float(k @ np.asarray(beta)) + plane.h
                assert bound <= a[beta] + 1e-8
            for beta in plane.touching:
                bound = float(k @ np.asarray(beta)) + plane.h
                assert bound == pytest.approx(a[beta], abs=1e-6)


def test_minorant_lp_unbounded_beyond_finite_hull():
    g = SequenceGrid((2,), [0.0, 5.0, math.inf], LOG)
    res = minorant_lp(g)
    assert math.isinf(res.minorant.value((2,)))
    assert res.certificates[(2,)] is None
    assert (2,) in res.boundary_affected


def test_minorant_lp_agrees_with_sweep_on_random_lines():
    for seed in range(30):
        g = random_grid((8,), seed=seed)
        res = minorant_lp(g)
        poly = envelope1d.sweep(g)
        assert np.allclose(res.minorant.flat, poly.minorant, atol=1e-8)


def test_minorant_lp_parallel_matches_serial():
    g = random_grid((3, 3), seed=11)
    serial = minorant_lp(g)
    threaded = minorant_lp(g, parallel=True)
    assert np.array_equal(serial.minorant.values, threaded.minorant.values)
    assert serial.contact_set == threaded.contact_set


def test_minorant_lp_rejects_invalid_grids():
    bad = SequenceGrid((2,), [0.0, math.nan, 1.0], LOG)
    with pytest.raises(GridValidationError):
        minorant_lp(bad)
    with pytest.raises(ScaleMismatch):
        minorant_lp(SequenceGrid((1,), [1.0, 2.0], EXP))


# ------------------------------------------------------------------ faces


def test_boundary_restriction_extracts_faces():
    g = as_log_grid(notconvex_grid((2, 2)))
    row = boundary_restriction(g, 0)
    col = boundary_restriction(g, 1)
    assert row.box == (2,) and col.box == (2,)
    assert np.allclose(row.values, [0.0, 3.0, 8.0])
    assert np.allclose(col.values, [0.0, 3.0, 8.0])


def test_boundary_restriction_guards():
    with pytest.raises(DimensionMismatch):
        boundary_restriction(REF, 0)
    g = as_log_grid(notconvex_grid((2, 2)))
    with pytest.raises(OutOfRange):
        boundary_restriction(g, 2)


def test_face_minorant_equals_restricted_minorant():
    for seed in range(10):
        g = random_grid((3, 4), seed=seed + 50)
        full = minorant_lp(g)
        for axis in range(2):
            face = boundary_restriction(g, axis)
            face_res = minorant_lp(face)
            restricted = np.take(full.minorant.values, 0, axis=axis)
            assert np.allclose(face_res.minorant.values, restricted, atol=1e-8)


# -------------------------------------------------------------- stability


def test_stability_probe_flags_the_moving_edge_value():
    small = REF
    large = SequenceGrid((4,), [0.0, 2.0, 1.0, 6.0, 2.0], LOG)
    rep = stability_probe(small, large)
    assert np.allclose(rep.diff, [0.0, 0.0, 0.0, 4.5])
    assert rep.unstable == ((3,),)
    assert rep.max_diff == pytest.approx(4.5)


def test_stability_probe_convex_extension_is_quiet():
    small = SequenceGrid((2,), [0.0, 1.0, 2.0], LOG)
    large = SequenceGrid((3,), [0.0, 1.0, 2.0, 3.0], LOG)
    rep = stability_probe(small, large)
    assert rep.unstable == ()
    assert rep.max_diff == pytest.approx(0.0)


def test_stability_probe_mismatch_guards():
    with pytest.raises(GridMismatch):
        stability_probe(REF, as_log_grid(notconvex_grid((2, 2))))
    with pytest.raises(GridMismatch):
        stability_probe(REF, SequenceGrid((3,), np.exp([0.0, 2.0, 1.0, 6.0]), EXP))
    with pytest.raises(GridMismatch):
        stability_probe(REF, SequenceGrid((2,), [0.0, 2.0, 1.0], LOG))
    with pytest.raises(GridMismatch):
        stability_probe(REF, SequenceGrid((4,), [0.0, 2.0, 1.5, 6.0, 2.0], LOG))
