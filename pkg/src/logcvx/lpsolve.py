"""Dense two-phase simplex and a brute-force envelope oracle.

The solver handles small problems of the form

    maximize  objective . x
    s.t.      lhs @ x <= rhs        (rows with rhs = +inf are dropped)
              x_j >= 0 or x_j free  (free variables are split internally)

Pivoting uses Bland's smallest-index rule throughout, so runs are
deterministic and cycle-free; identical inputs produce bit-identical output.
If a pivot below 1e-13 is forced, the system is row-equilibrated once and
re-solved before giving up with NumericBreakdown.

``brute_force_envelope`` is an independent cross-check for lower convex
envelope values: it enumerates small point subsets and minimizes over convex
combinations hitting the target (any envelope value is attained by at most
d+1 points).  It shares no code with the simplex path on purpose.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericBreakdown, TargetOutsideHull

OPTIMAL = "optimal"
UNBOUNDED = "unbounded"
INFEASIBLE = "infeasible"

FEAS_TOL = 1e-9
RED_TOL = 1e-9
PIVOT_TOL = 1e-11
MAX_VARS = 64


@dataclass(frozen=True, eq=False)
class DenseLP:
    """maximize objective . x subject to lhs @ x <= rhs."""

    objective: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    nonneg: np.ndarray  # bool per variable; False means the variable is free

    @classmethod
    def maximize(cls, objective, lhs, rhs, nonneg=None) -> "DenseLP":
        objective = np.atleast_1d(np.asarray(objective, dtype=float))
        lhs = np.asarray(lhs, dtype=float).reshape(-1, objective.size)
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if nonneg is None:
            nonneg = np.zeros(objective.size, dtype=bool)
        else:
            nonneg = np.atleast_1d(np.asarray(nonneg, dtype=bool))
        if rhs.size != lhs.shape[0] or nonneg.size != objective.size:
            raise ValueError("inconsistent LP shapes")
        if objective.size > MAX_VARS:
            raise ValueError(f"at most {MAX_VARS} variables supported")
        if not np.all(np.isfinite(objective)) or not np.all(np.isfinite(lhs)):
            raise ValueError("objective and lhs must be finite")
        if np.any(np.isnan(rhs)):
            raise ValueError("rhs must not contain NaN")
        return cls(objective, lhs, rhs, nonneg)


@dataclass(frozen=True, eq=False)
class LPSolution:
    """Solver result.

    ``optimum`` is +inf when UNBOUNDED and NaN when INFEASIBLE.  ``active_rows``
    lists, in ascending order, every original constraint row tight within
    1e-9 at the returned point.
    """

    status: str
    optimum: float
    point: np.ndarray | None
    active_rows: tuple[int, ...]


def _pivot(T: np.ndarray, basis: list[int], r: int, c: int) -> None:
    piv = T[r, c]
    if abs(piv) < 1e-13:
        raise NumericBreakdown(f"pivot {piv!r} below 1e-13")
    T[r] = T[r] / piv
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])
    # kill accumulated drift in the pivot column
    T[:, c] = 0.0
    T[r, c] = 1.0
    basis[r] = c


def _bland(T: np.ndarray, basis: list[int], m: int, obj_row: int,
           enter_cols: int, maxiter: int) -> str:
    """Run Bland-rule simplex iterations in place; returns optimal/unbounded."""
    for _ in range(maxiter):
        red = T[obj_row, :enter_cols]
        in_basis = np.zeros(enter_cols, dtype=bool)
        for b in basis:
            if b < enter_cols:
                in_basis[b] = True
        candidates = np.flatnonzero((red < -RED_TOL) & ~in_basis)
        if candidates.size == 0:
            return OPTIMAL
        enter = int(candidates[0])
        col = T[:m, enter]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            return UNBOUNDED
        ratios = T[rows, -1] / col[rows]
        rmin = ratios.min()
        tie = rows[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
        # Bland tie-break: leave the row whose basic variable has smallest index
        leave = int(min(tie, key=lambda i: basis[i]))
        _pivot(T, basis, leave, enter)
    raise NumericBreakdown(f"no convergence within {maxiter} pivots")


def _solve_standard(A: np.ndarray, b: np.ndarray, c: np.ndarray):
    """maximize c.x s.t. Ax <= b, x >= 0; returns (status, x)."""
    m, n = A.shape
    maxiter = 10000 + 50 * (m + n)
    neg = np.flatnonzero(b < 0.0)
    k = neg.size
    T = np.zeros((m + (2 if k else 1), n + m + k + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    basis = [n + i for i in range(m)]
    T[m, :n] = -c  # phase-2 objective row

    if k:
        T[neg, :] *= -1.0
        art = []
        for t, i in enumerate(neg):
            col = n + m + t
            T[i, col] = 1.0
            basis[i] = col
            art.append(col)
        # phase-1 objective: maximize -(sum of artificials), expressed through
        # the current all-artificial-and-slack basis
        T[m + 1, art] = 1.0
        for i in neg:
            T[m + 1] -= T[i]
        status = _bland(T, basis, m, m + 1, n + m, maxiter)
        if status != OPTIMAL or T[m + 1, -1] < -FEAS_TOL:
            return INFEASIBLE, None
        # drive leftover artificials out of the (degenerate) basis
        drop_rows = []
        for i in range(m):
            if basis[i] in art:
                nz = np.flatnonzero(np.abs(T[i, :n + m]) > PIVOT_TOL)
                if nz.size:
                    _pivot(T, basis, i, int(nz[0]))
                else:
                    drop_rows.append(i)  # redundant constraint row
        if drop_rows:
            keep = [i for i in range(m) if i not in drop_rows]
            T = np.vstack([T[keep], T[m:]])
            basis = [basis[i] for i in keep]
            m = len(basis)
        T = np.delete(T, art, axis=1)
        T = np.delete(T, m + 1, axis=0)

    status = _bland(T, basis, m, m, T.shape[1] - 1, maxiter)
    if status != OPTIMAL:
        return UNBOUNDED, None
    x = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i, -1]
    return OPTIMAL, x


def solve(lp: DenseLP) -> LPSolution:
    """Solve a DenseLP; see module docstring for conventions."""
    obj = np.asarray(lp.objective, dtype=float)
    lhs = np.asarray(lp.lhs, dtype=float)
    rhs = np.asarray(lp.rhs, dtype=float)
    nonneg = np.asarray(lp.nonneg, dtype=bool)
    n = obj.size
    if np.any(np.isneginf(rhs)):
        return LPSolution(INFEASIBLE, math.nan, None, ())
    keep = np.isfinite(rhs)
    A = lhs[keep]
    b = rhs[keep]

    # split free variables into positive and negative parts
    pos_col = np.zeros(n, dtype=int)
    neg_col = np.full(n, -1, dtype=int)
    cols = 0
    for j in range(n):
        pos_col[j] = cols
        cols += 1
        if not nonneg[j]:
            neg_col[j] = cols
            cols += 1
    A2 = np.zeros((A.shape[0], cols))
    c2 = np.zeros(cols)
    for j in range(n):
        A2[:, pos_col[j]] = A[:, j]
        c2[pos_col[j]] = obj[j]
        if neg_col[j] >= 0:
            A2[:, neg_col[j]] = -A[:, j]
            c2[neg_col[j]] = -obj[j]

    try:
        status, x2 = _solve_standard(A2, b, c2)
    except NumericBreakdown:
        # one retry after row equilibration, then give up
        scale = np.maximum(np.abs(A2).max(axis=1, initial=0.0), np.abs(b))
        scale[scale == 0.0] = 1.0
        status, x2 = _solve_standard(A2 / scale[:, None], b / scale, c2)

    if status == INFEASIBLE:
        return LPSolution(INFEASIBLE, math.nan, None, ())
    if status == UNBOUNDED:
        return LPSolution(UNBOUNDED, math.inf, None, ())
    x = np.zeros(n)
    for j in range(n):
        x[j] = x2[pos_col[j]] - (x2[neg_col[j]] if neg_col[j] >= 0 else 0.0)
    resid = lhs @ x - rhs
    scale = np.maximum(1.0, np.abs(rhs))
    with np.errstate(invalid="ignore"):
        active = np.flatnonzero(np.isfinite(rhs) & (np.abs(resid) <= FEAS_TOL * scale))
    return LPSolution(OPTIMAL, float(obj @ x), x, tuple(int(i) for i in active))


def brute_force_envelope(points, target) -> float:
    """Lower convex envelope value at ``target`` by subset enumeration.

    ``points`` is a list of (multi-index, value) pairs; entries with value
    +inf impose no constraint and are ignored.  The value at a target inside
    the hull of the finite abscissae is the minimum of sum(lam_i * v_i) over
    convex combinations of at most d+1 points whose abscissae combine to the
    target; TargetOutsideHull if no combination exists.

    Meant for small instances (roughly <= 25 finite points) as an independent
    oracle for the LP route.
    """
    target = tuple(target)
    d = len(target)
    finite = [(tuple(int(c) for c in a), float(v)) for a, v in points
              if math.isfinite(float(v))]
    if not finite:
        raise TargetOutsideHull("no finite points given")
    P = np.array([a for a, _ in finite], dtype=float)
    vals = np.array([v for _, v in finite])
    n = len(finite)
    rhs = np.array([1.0, *map(float, target)])

    best = math.inf
    if n >= d + 1:
        combos = np.array(list(itertools.combinations(range(n), d + 1)))
        M = np.empty((combos.shape[0], d + 1, d + 1))
        M[:, 0, :] = 1.0
        M[:, 1:, :] = P[combos].transpose(0, 2, 1)
        dets = np.linalg.det(M)
        good = np.abs(dets) > 1e-8
        if good.any():
            B = np.broadcast_to(rhs[:, None], (int(good.sum()), d + 1, 1))
            lam = np.linalg.solve(M[good], np.ascontiguousarray(B))[:, :, 0]
            feasible = (lam >= -1e-12).all(axis=1)
            if feasible.any():
                cand = (lam[feasible] * vals[combos[good][feasible]]).sum(axis=1)
                best = float(cand.min())
    if math.isinf(best):
        # degenerate point sets: fall back to smaller subsets via least squares
        for size in range(1, min(n, d + 1) + 1):
            for combo in itertools.combinations(range(n), size):
                Q = np.vstack([np.ones(size), P[list(combo)].T])
                lam, *_ = np.linalg.lstsq(Q, rhs, rcond=None)
                if np.all(lam >= -1e-12) and np.allclose(Q @ lam, rhs, atol=1e-9):
                    best = min(best, float(lam @ vals[list(combo)]))
    if math.isinf(best):
        raise TargetOutsideHull(f"{target} outside the hull of the finite abscissae")
    return best
