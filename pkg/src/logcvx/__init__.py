"""Convex minorants of multi-index sequences and log-convex regularization.

The library computes, for real data a_alpha indexed by a d-dimensional box of
multi-indices, the largest convex sequence below it (the pointwise supremum of
affine minorants), together with supporting-plane certificates; on the
exponential scale this is log-convex regularization M -> exp((log M)^c).  On
top of that sit the associated weight function omega_M, a supremum check that
characterizes log-convexity, and verifiers for relations between weight
matrices and structural conditions on a single matrix.
"""
from .assoc import (AssociatedFunction, LogConvexityReport, LogConvexMinorant,
                    OmegaEval, SGridSpec, check_log_convexity,
                    log_convex_minorant, omega, q3_supremum, q3_supremum_log,
                    trace_function)
from .core import (EXP, LOG, GrowthDiagnostic, SequenceGrid, Violation,
                   as_log_grid, boundary_infinities, growth_check, to_exp,
                   to_log, validate_grid)
from .envelope import (DualValue, KGridSpec, MinorantResult, StabilityReport,
                       SupportPlane, axis_slope_range, boundary_restriction,
                       dual_value, h_of_k, minorant_lp, quotient_range,
                       stability_probe)
from .envelope1d import NewtonPolygon, PolygonSegment, evaluate, sweep
from .errors import (AllInfinite, BoxTooSmall, DimensionMismatch, EmptyKGrid,
                     EmptySGrid, EmptyShell, GridMismatch,
                     GridValidationError, LevelNotFound, LogcvxError,
                     NonPositiveEntry, NotNormalized, NumericBreakdown,
                     OutOfRange, ScaleMismatch, SchemaError, TargetOutsideHull)
from .generators import (SplitMix64, convex_random_grid, factorial_grid,
                         log_convex_random_1d, notconvex_grid, random_grid)
from .io import (canonical_json, fmt_float, read_condition_witness, read_grid,
                 read_matrix, read_relation_witness, read_report, to_jsonable,
                 write_condition_witness, write_grid, write_matrix,
                 write_relation_witness, write_report)
from .lpsolve import DenseLP, LPSolution, brute_force_envelope
from .matrices import (BEURLING, CONDITIONS, RELATION_KINDS, ROUMIEU,
                       TRIANGLE, ConditionEntry, ConditionReport,
                       ConditionWitness, RelationEntry, RelationReport,
                       RelationWitness, SearchOutcome, SearchSpace,
                       SlackRecord, WeightMatrix, l37r_counterexample_curve,
                       l37r_counterexample_matrix, search_relation,
                       verify_condition, verify_relation)

__version__ = "0.1.0"

__all__ = [
    "AllInfinite", "AssociatedFunction", "BEURLING", "BoxTooSmall",
    "CONDITIONS", "ConditionEntry", "ConditionReport", "ConditionWitness",
    "DenseLP", "DimensionMismatch", "DualValue", "EXP", "EmptyKGrid",
    "EmptySGrid", "EmptyShell", "GridMismatch", "GridValidationError",
    "GrowthDiagnostic", "KGridSpec", "LOG", "LPSolution", "LevelNotFound",
    "LogConvexMinorant", "LogConvexityReport", "LogcvxError", "MinorantResult",
    "NewtonPolygon", "NonPositiveEntry", "NotNormalized", "NumericBreakdown",
    "OmegaEval", "OutOfRange", "PolygonSegment", "RELATION_KINDS", "ROUMIEU",
    "RelationEntry", "RelationReport", "RelationWitness", "SGridSpec",
    "ScaleMismatch", "SchemaError", "SearchOutcome", "SearchSpace",
    "SequenceGrid", "SlackRecord", "SplitMix64", "StabilityReport",
    "SupportPlane", "TRIANGLE", "TargetOutsideHull", "Violation",
    "WeightMatrix", "as_log_grid", "axis_slope_range", "boundary_infinities",
    "boundary_restriction", "brute_force_envelope", "canonical_json",
    "check_log_convexity", "convex_random_grid", "dual_value", "evaluate",
    "factorial_grid", "fmt_float", "growth_check", "h_of_k",
    "l37r_counterexample_curve", "l37r_counterexample_matrix",
    "log_convex_minorant", "log_convex_random_1d", "minorant_lp",
    "notconvex_grid", "omega", "q3_supremum", "q3_supremum_log",
    "quotient_range", "random_grid", "read_condition_witness", "read_grid",
    "read_matrix", "read_relation_witness", "read_report", "search_relation",
    "stability_probe", "sweep", "to_exp", "to_jsonable", "to_log",
    "trace_function", "validate_grid", "verify_condition", "verify_relation",
    "write_condition_witness", "write_grid", "write_matrix",
    "write_relation_witness", "write_report",
]
