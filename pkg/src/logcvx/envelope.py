"""Convex minorant on a lattice box via supporting hyperplanes.

For a LOG-scale grid a the minorant at alpha is

    a^c_alpha = sup { <k, alpha> + c : <k, beta> + c <= a_beta for all beta }

i.e. the highest supporting hyperplane below the data, evaluated at alpha.
Three routes are offered:

* ``minorant_lp``     exact per-point LP (the reference route, certified),
* ``dual_value``      sampled slope grid, lower bound, cheap at a single real x,
* the 1-D sweep in :mod:`logcvx.envelope1d`.

A +inf data entry imposes no constraint.  Values are exact for the truncated
point set; they upper-bound the untruncated minorant, and certificates whose
touching set meets the truncation faces are flagged ``boundary_affected``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import lpsolve
from .core import (LOG, MultiIndex, SequenceGrid, index_array, order_array,
                   outer_shell_mask, validate_grid)
from .errors import (AllInfinite, DimensionMismatch, EmptyKGrid,
                     GridMismatch, GridValidationError, OutOfRange, ScaleMismatch)

TOUCH_REL_TOL = 1e-12
CONTACT_TOL = 1e-9
STABLE_TOL = 1e-9


@dataclass(frozen=True)
class SupportPlane:
    """An affine minorant <k, x> + h touching the data on ``touching``."""

    k: tuple[float, ...]
    h: float
    touching: tuple[MultiIndex, ...]


def _require_log(g: SequenceGrid, who: str) -> None:
    if g.scale != LOG:
        raise ScaleMismatch(f"{who} expects a LOG-scale grid")


def h_of_k(g: SequenceGrid, k) -> SupportPlane:
    """Best intercept h_k = min_alpha (a_alpha - <k, alpha>) for a fixed slope."""
    _require_log(g, "h_of_k")
    k = np.asarray(k, dtype=float)
    if k.shape != (g.dim,):
        raise DimensionMismatch(f"k must have length {g.dim}")
    a = g.flat
    finite = np.isfinite(a)
    if not finite.any():
        raise AllInfinite("grid has no finite entries")
    idx = index_array(g.box)
    diffs = a[finite] - idx[finite].astype(float) @ k
    h = float(diffs.min())
    touch = diffs <= h + TOUCH_REL_TOL * max(1.0, abs(h))
    touching = tuple(tuple(r.tolist()) for r in idx[finite][touch])
    return SupportPlane(tuple(float(c) for c in k), h, touching)


def quotient_range(g: SequenceGrid) -> tuple[float, float]:
    """Extreme difference quotients (a_alpha - a_0)/|alpha| of the data."""
    _require_log(g, "quotient_range")
    a = g.flat
    orders = order_array(g.box)
    mask = np.isfinite(a) & (orders > 0)
    if not mask.any():
        return (0.0, 0.0)
    q = (a[mask] - a[0]) / orders[mask]
    return (float(q.min()), float(q.max()))


def axis_slope_range(g: SequenceGrid) -> tuple[float, float]:
    """Extreme axis-aligned difference quotients (a_{alpha+m e_j} - a_alpha)/m
    over finite pairs and all axes j.

    Every supporting slope of the convex minorant lies in this interval (a
    hull slope along an axis is a mean of data quotients along that axis), so
    it is the right default range for slope sampling; the origin-anchored
    quotient_range is strictly narrower whenever the data accelerates.
    """
    _require_log(g, "axis_slope_range")
    A = np.asarray(g.values, dtype=float)
    lo, hi = math.inf, -math.inf
    for j, n in enumerate(g.box):
        Aj = np.moveaxis(A, j, 0)
        for m in range(1, n + 1):
            with np.errstate(invalid="ignore"):
                q = (Aj[m:] - Aj[:-m]) / m
            q = q[np.isfinite(q)]
            if q.size:
                lo = min(lo, float(q.min()))
                hi = max(hi, float(q.max()))
    if not math.isfinite(lo):
        return (0.0, 0.0)
    return (lo, hi)


@dataclass(frozen=True)
class KGridSpec:
    """Axis-aligned uniform slope grid: the same [lo, hi] range on every axis."""

    lo: float
    hi: float
    step: float = 0.25

    @classmethod
    def from_grid(cls, g: SequenceGrid, step: float = 0.25) -> "KGridSpec":
        lo, hi = axis_slope_range(g)
        return cls(lo, hi, step)

    def axis_samples(self) -> np.ndarray:
        if self.step <= 0 or self.hi < self.lo:
            raise EmptyKGrid(f"bad k-grid [{self.lo}, {self.hi}] step {self.step}")
        n = int(math.floor((self.hi - self.lo) / self.step + 1e-12)) + 1
        return self.lo + self.step * np.arange(n)

    def samples(self, dim: int) -> np.ndarray:
        ax = self.axis_samples()
        if ax.size == 0:
            raise EmptyKGrid("k-grid has no samples")
        grids = np.meshgrid(*([ax] * dim), indexing="ij")
        return np.stack([a.reshape(-1) for a in grids], axis=1)


@dataclass(frozen=True)
class DualValue:
    value: float
    k: tuple[float, ...]
    spec: KGridSpec


def dual_value(g: SequenceGrid, x, k_grid: KGridSpec | None = None) -> DualValue:
    """sup over the sampled slopes of <k, x> + h_k; a lower bound on the envelope.

    x is a real point inside the box (componentwise 0 <= x_j <= N_j).
    """
    _require_log(g, "dual_value")
    x = np.asarray(x, dtype=float)
    if x.shape != (g.dim,):
        raise DimensionMismatch(f"x must have length {g.dim}")
    if np.any(x < 0) or np.any(x > np.asarray(g.box)):
        raise OutOfRange(f"x={x.tolist()} outside the box {g.box}")
    spec = k_grid if k_grid is not None else KGridSpec.from_grid(g)
    K = spec.samples(g.dim)
    a = g.flat
    finite = np.isfinite(a)
    if not finite.any():
        raise AllInfinite("grid has no finite entries")
    P = index_array(g.box)[finite].astype(float)
    af = a[finite]
    best_val = -math.inf
    best_k = K[0]
    for start in range(0, K.shape[0], 4096):
        blk = K[start:start + 4096]
        h = (af[None, :] - blk @ P.T).min(axis=1)
        vals = blk @ x + h
        i = int(np.argmax(vals))
        if vals[i] > best_val:
            best_val = float(vals[i])
            best_k = blk[i]
    return DualValue(best_val, tuple(float(c) for c in best_k), spec)


@dataclass(frozen=True, eq=False)
class MinorantResult:
    """LP minorant with per-index certificates.

    ``certificates[alpha]`` is the optimal supporting plane (None where the
    per-point LP is unbounded, which happens only when +inf entries leave the
    target outside the hull of the finite abscissae; the minorant is +inf
    there).  ``contact_set`` lists indices where the minorant meets the data;
    ``boundary_affected`` lists indices whose certificate touches the
    truncation faces, i.e. whose value could move if the box grew.
    """

    minorant: SequenceGrid
    certificates: dict[MultiIndex, SupportPlane | None]
    contact_set: tuple[MultiIndex, ...]
    boundary_affected: tuple[MultiIndex, ...]


def _solve_point(lhs, b, alpha, dim):
    obj = np.array([*alpha, 1.0], dtype=float)
    lp = lpsolve.DenseLP.maximize(obj, lhs, b, np.zeros(dim + 1, dtype=bool))
    return lpsolve.solve(lp)


def minorant_lp(g: SequenceGrid, parallel: bool = False) -> MinorantResult:
    """Exact convex minorant of a validated LOG-scale grid, one LP per index."""
    _require_log(g, "minorant_lp")
    violations = validate_grid(g)
    if violations:
        raise GridValidationError(violations)
    a = g.flat
    idx = index_array(g.box)
    finite = np.isfinite(a)
    P_f = idx[finite].astype(float)
    finite_indices = [tuple(r.tolist()) for r in idx[finite]]
    on_shell = outer_shell_mask(g.box)[finite]
    # shift so the all-slack basis is feasible and phase 1 is skipped
    shift = float(a[finite].min())
    b = a[finite] - shift
    lhs = np.hstack([P_f, np.ones((P_f.shape[0], 1))])

    targets = [tuple(r.tolist()) for r in idx]
    if parallel:
        with ThreadPoolExecutor() as pool:
            sols = list(pool.map(lambda t: _solve_point(lhs, b, t, g.dim), targets))
    else:
        sols = [_solve_point(lhs, b, t, g.dim) for t in targets]

    values = np.empty(a.size)
    certificates: dict[MultiIndex, SupportPlane | None] = {}
    boundary: list[MultiIndex] = []
    for i, (alpha, sol) in enumerate(zip(targets, sols)):
        if sol.status == lpsolve.UNBOUNDED:
            values[i] = math.inf
            certificates[alpha] = None
            boundary.append(alpha)
            continue
        if sol.status != lpsolve.OPTIMAL:
            raise GridMismatch(f"per-point LP at {alpha} came back {sol.status}")
        values[i] = sol.optimum + shift
        k = tuple(float(c) for c in sol.point[:g.dim])
        h = float(sol.point[g.dim]) + shift
        touching = tuple(finite_indices[r] for r in sol.active_rows)
        certificates[alpha] = SupportPlane(k, h, touching)
        if any(on_shell[r] for r in sol.active_rows):
            boundary.append(alpha)

    contact = [alpha for i, alpha in enumerate(targets)
               if finite[i] and abs(a[i] - values[i]) <= CONTACT_TOL * max(1.0, abs(a[i]))]
    minorant = SequenceGrid(g.box, values, LOG)
    return MinorantResult(minorant, certificates, tuple(contact), tuple(boundary))


def boundary_restriction(g: SequenceGrid, axis: int) -> SequenceGrid:
    """The face alpha_axis = 0 as a (d-1)-dimensional grid."""
    if g.dim < 2:
        raise DimensionMismatch("boundary_restriction needs dim >= 2")
    if not (0 <= axis < g.dim):
        raise OutOfRange(f"axis {axis} out of range for dim {g.dim}")
    box = tuple(n for j, n in enumerate(g.box) if j != axis)
    return SequenceGrid(box, np.take(g.values, 0, axis=axis), g.scale)


@dataclass(frozen=True, eq=False)
class StabilityReport:
    """Minorant of the small box vs. the same box inside an enlarged grid.

    The enlarged minorant can only be lower (more supporting-plane
    constraints); ``unstable`` lists small-box indices whose value moved by
    more than 1e-9, i.e. values the truncation did not certify.
    """

    diff: np.ndarray
    unstable: tuple[MultiIndex, ...]
    max_diff: float
    small: MinorantResult
    large: MinorantResult


def stability_probe(g_small: SequenceGrid, g_large: SequenceGrid) -> StabilityReport:
    if g_small.dim != g_large.dim:
        raise GridMismatch("dimension mismatch between the two grids")
    if g_small.scale != g_large.scale:
        raise GridMismatch("scale mismatch between the two grids")
    if any(nl < ns for ns, nl in zip(g_small.box, g_large.box)):
        raise GridMismatch(f"{g_large.box} does not enclose {g_small.box}")
    window = tuple(slice(0, n + 1) for n in g_small.box)
    if not np.array_equal(g_large.values[window], g_small.values):
        raise GridMismatch("values disagree on the common box")
    small = minorant_lp(g_small)
    large = minorant_lp(g_large)
    vs = small.minorant.values
    vl = large.minorant.values[window]
    both_inf = np.isposinf(vs) & np.isposinf(vl)
    diff = np.where(both_inf, 0.0, np.abs(vs - vl))
    idx = index_array(g_small.box)
    unstable = tuple(tuple(r.tolist()) for r in idx[diff.reshape(-1) > STABLE_TOL])
    return StabilityReport(diff, unstable, float(np.nanmax(diff)), small, large)
