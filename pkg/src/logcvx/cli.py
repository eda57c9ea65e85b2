"""Command-line interface.

One binary with subcommands; every command prints a human-readable report by
default and a canonical JSON payload with --json.  The JSON payload is a pure
function of the input bytes and flags (no timestamps, no durations), so two
runs on identical inputs are byte-identical.  Exit codes: 0 success,
2 validation failure, 3 parse/usage failure on input files, 4 numeric
breakdown inside a solver.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import assoc as _assoc
from . import envelope, envelope1d, generators, io, lpsolve, matrices
from .core import (EXP, LOG, SequenceGrid, as_log_grid, growth_check,
                   index_array)
from .errors import (EmptyShell, GridValidationError, LogcvxError,
                     NotNormalized, NumericBreakdown, OutOfRange, SchemaError,
                     TargetOutsideHull)

_EXIT_VALIDATION = 2
_EXIT_PARSE = 3
_EXIT_NUMERIC = 4

_ORACLE_POINT_CAP = 25


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise SchemaError(path, "readable file", str(e)) from None


def _digest(chunks: list[bytes]) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return "sha256:" + h.hexdigest()


def _parse_floats(text: str, flag: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(","))
    except ValueError:
        raise SchemaError(flag, "comma-separated numbers", repr(text)) from None


def _parse_ints(text: str, flag: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(","))
    except ValueError:
        raise SchemaError(flag, "comma-separated integers", repr(text)) from None


def _grid_dict(g: SequenceGrid) -> dict:
    vals = [x if math.isfinite(x) else io.fmt_float(x) for x in g.flat.tolist()]
    return {"box": list(g.box), "dim": g.dim, "scale": g.scale, "values": vals}


def _growth_warnings(g: SequenceGrid) -> list[str]:
    try:
        diag = growth_check(as_log_grid(g))
    except (EmptyShell, LogcvxError):
        return []
    if not diag.passes:
        return [f"growth: outer-shell ratios do not dominate "
                f"(min outer {diag.min_boundary_ratio:.6g})"]
    return []


def _emit(args, results: dict, warnings: list[str], inputs: list[bytes],
          started: float) -> int:
    payload = {
        "command": args._echo,
        "input_digest": _digest(inputs),
        "results": results,
        "warnings": warnings,
    }
    if args.json:
        print(io.write_report(payload))
    else:
        _render(results, indent=0)
        for w in warnings:
            print(f"warning: {w}")
        print(f"duration: {1000.0 * (time.monotonic() - started):.1f} ms")
    return 0


def _render(obj, indent: int, key: str | None = None) -> None:
    pad = "  " * indent
    label = f"{pad}{key}: " if key is not None else pad
    if isinstance(obj, dict):
        if key is not None:
            print(f"{pad}{key}:")
        for k, v in obj.items():
            _render(v, indent + (key is not None), k)
    elif isinstance(obj, list) and obj and isinstance(obj[0], (dict, list)):
        if key is not None:
            print(f"{pad}{key}:")
        for v in obj[:40]:
            _render(v, indent + 1)
        if len(obj) > 40:
            print(f"{pad}  ... {len(obj) - 40} more")
    elif isinstance(obj, float):
        print(f"{label}{io.fmt_float(obj)}")
    else:
        print(f"{label}{obj}")


def _alpha_list(arr) -> list[list[int]]:
    return [list(map(int, a)) for a in arr]


def cmd_minorant(args) -> int:
    started = time.monotonic()
    raw = _read_file(args.input)
    g = io.read_grid(raw)
    work = as_log_grid(g)
    warnings = _growth_warnings(work)
    if g.scale == EXP:
        warnings.append("input converted to log scale; minorant values below are log scale")

    results: dict = {"method": args.method}
    if args.method == "sweep":
        if work.dim != 1:
            raise OutOfRange("--method sweep needs a one-dimensional grid")
        poly = envelope1d.sweep(work)
        results["minorant"] = _grid_dict(SequenceGrid(work.box, poly.minorant, LOG))
        results["contacts"] = [[int(p)] for p in poly.contacts]
        results["segments"] = [
            {"lo": s.lo, "hi": s.hi, "slope": s.slope, "intercept": s.intercept}
            for s in poly.segments]
        boundary = [[int(p)] for p in poly.boundary_affected]
    elif args.method == "lp":
        res = envelope.minorant_lp(work, parallel=args.parallel)
        results["minorant"] = _grid_dict(res.minorant)
        results["contacts"] = _alpha_list(res.contact_set)
        results["certificates"] = [
            {"alpha": list(map(int, a)), "k": list(map(float, pl.k)),
             "h": float(pl.h), "touching": _alpha_list(pl.touching)}
            for a, pl in sorted(res.certificates.items())]
        boundary = _alpha_list(res.boundary_affected)
    elif args.method == "oracle":
        if work.n_points > _ORACLE_POINT_CAP:
            raise _oracle_too_big(work)
        idx = index_array(work.box)
        pairs = list(zip((tuple(map(int, a)) for a in idx), work.flat.tolist()))
        vals = []
        for alpha in idx:
            try:
                vals.append(lpsolve.brute_force_envelope(pairs, tuple(map(int, alpha))))
            except TargetOutsideHull:
                vals.append(float("inf"))
        results["minorant"] = _grid_dict(SequenceGrid(work.box, vals, LOG))
        boundary = []
    else:  # dual-grid
        spec = envelope.KGridSpec.from_grid(work, step=args.k_step)
        idx = index_array(work.box)
        vals = [envelope.dual_value(work, tuple(map(int, a)), spec).value
                for a in idx]
        results["minorant"] = _grid_dict(SequenceGrid(work.box, vals, LOG))
        results["k_grid"] = {"lo": spec.lo, "hi": spec.hi, "step": spec.step}
        boundary = []
    results["boundary_affected"] = boundary
    if boundary:
        warnings.append(
            f"certificates touch the outer shell at {len(boundary)} indices; "
            "values there are upper bounds for any enclosing box")

    if args.stability is not None:
        larger_raw = _read_file(args.stability)
        larger = as_log_grid(io.read_grid(larger_raw))
        probe = envelope.stability_probe(work, larger)
        results["stability"] = {
            "max_diff": probe.max_diff,
            "unstable": _alpha_list(probe.unstable),
        }
        return _emit(args, results, warnings, [raw, larger_raw], started)
    return _emit(args, results, warnings, [raw], started)


def _oracle_too_big(work) -> Exception:
    return OutOfRange(
        f"--method oracle enumerates subsets and is capped at "
        f"{_ORACLE_POINT_CAP} grid points; this grid has {work.n_points}")


def cmd_assoc(args) -> int:
    started = time.monotonic()
    raw = _read_file(args.input)
    g = io.read_grid(raw)
    af = _assoc.AssociatedFunction(g)
    warnings = _growth_warnings(g)
    results: dict = {}
    rows = []
    for text in args.t or []:
        t = _parse_floats(text, "--t")
        ev = af.evaluate(t)
        rows.append({"t": list(t), "omega": ev.value,
                     "argmax": list(map(int, ev.argmax)),
                     "on_boundary": ev.sup_on_boundary})
    if args.t_grid is not None:
        lo, hi, n = _parse_floats(args.t_grid, "--t-grid")
        if lo <= 0 or hi <= lo or int(n) < 2:
            raise OutOfRange("--t-grid needs 0 < LO < HI and N >= 2")
        for t in np.geomspace(lo, hi, int(n)):
            ev = af.evaluate((float(t),) * g.dim)
            rows.append({"t": [float(t)] * g.dim, "omega": ev.value,
                         "argmax": list(map(int, ev.argmax)),
                         "on_boundary": ev.sup_on_boundary})
    if rows:
        results["omega"] = rows
    if args.trace_k is not None:
        k = _parse_floats(args.trace_k, "--trace-k")
        results["trace"] = {"k": list(k), "value": af.trace(k)}
    if not results:
        raise OutOfRange("nothing to do: pass --t, --t-grid or --trace-k")
    if any(r["on_boundary"] for r in rows):
        warnings.append("some suprema are attained on the outer shell; "
                        "enlarge the box to certify those values")
    return _emit(args, results, warnings, [raw], started)


def cmd_check(args) -> int:
    started = time.monotonic()
    raw = _read_file(args.input)
    g = io.read_grid(raw)
    s_grid = None
    if args.s_points is not None:
        s_grid = _assoc.SGridSpec.from_grid(g, points=args.s_points)
    report = _assoc.check_log_convexity(g, s_grid=s_grid)
    warnings = _growth_warnings(g)
    if report.boundary_caveat:
        warnings.append("verdicts near the outer shell are box-dependent; "
                        "interior flags shown are trustworthy")
    results = {
        "coordinatewise_ok": report.coordinatewise_ok,
        "coordinatewise_violation":
            list(map(int, report.coordinatewise_violation))
            if report.coordinatewise_violation is not None else None,
        "globally_convex": report.globally_convex,
        "max_gap": report.max_gap,
        "interior_max_gap": report.interior_max_gap,
        "q3_holds": report.q3_holds,
        "q3_max_shortfall": report.q3_max_shortfall,
        "q3_worst": list(map(int, report.q3_worst)) if report.q3_worst is not None else None,
        "q3_failures": _alpha_list(report.q3_failures),
        "boundary_caveat": report.boundary_caveat,
        "minorant": _grid_dict(report.minorant.minorant),
    }
    return _emit(args, results, warnings, [raw], started)


def cmd_matrix(args) -> int:
    started = time.monotonic()
    if args.matrix_cmd == "counterexample":
        results: dict = {"margins": [[n, m] for n, m in
                                     matrices.l37r_counterexample_curve(args.n_max)]}
        inputs: list[bytes] = []
        if args.box is not None:
            box = _parse_ints(args.box, "--box")
            M = matrices.l37r_counterexample_matrix((box[0], box[1]))
            text = io.write_matrix(M)
            if args.out:
                Path(args.out).write_text(text + "\n", encoding="utf-8")
                results["written"] = args.out
            else:
                results["matrix"] = io.read_report(text)
        return _emit(args, results, [], inputs, started)

    raw_m = _read_file(args.M)
    M = io.read_matrix(raw_m)
    inputs = [raw_m]
    if args.matrix_cmd == "verify-relation":
        raw_n = _read_file(args.N)
        raw_w = _read_file(args.witness)
        inputs += [raw_n, raw_w]
        N = io.read_matrix(raw_n)
        witness = io.read_relation_witness(raw_w)
        rep = matrices.verify_relation(M, N, args.kind, witness)
        results = io.to_jsonable(rep)
    elif args.matrix_cmd == "search-relation":
        raw_n = _read_file(args.N)
        inputs.append(raw_n)
        N = io.read_matrix(raw_n)
        out = matrices.search_relation(M, N, args.kind)
        results = {
            "found": out.witness is not None,
            "witness": io.read_report(io.write_relation_witness(out.witness))
                       if out.witness is not None else None,
            "table": io.to_jsonable(out.table),
        }
    else:  # verify-condition
        raw_w = _read_file(args.witness)
        inputs.append(raw_w)
        witness = io.read_condition_witness(raw_w)
        rep = matrices.verify_condition(M, args.cond, witness)
        results = io.to_jsonable(rep)
    return _emit(args, results, [], inputs, started)


def cmd_gen(args) -> int:
    kind = args.kind
    fmt = args.format
    if kind == "notconvex":
        box = _parse_ints(args.box, "--box")
        g = generators.notconvex_grid((box[0], box[1]), scale=args.scale)
        text = io.write_grid(g, fmt=fmt)
    elif kind == "factorial":
        g = generators.factorial_grid(args.n, scale=args.scale)
        text = io.write_grid(g, fmt=fmt)
    elif kind == "random":
        box = _parse_ints(args.box, "--box")
        if args.dim is not None and args.dim != len(box):
            raise OutOfRange(f"--dim {args.dim} does not match --box {args.box}")
        g = generators.random_grid(box, args.seed, scale=args.scale,
                                   amplitude=args.amplitude, lift=args.lift)
        text = io.write_grid(g, fmt=fmt)
    elif kind == "convex":
        box = _parse_ints(args.box, "--box")
        g = generators.convex_random_grid(box, args.seed)
        text = io.write_grid(g, fmt=fmt)
    elif kind == "log-convex-1d":
        g = generators.log_convex_random_1d(args.n, args.seed)
        text = io.write_grid(g, fmt=fmt)
    else:  # l37r-counterexample
        box = _parse_ints(args.box, "--box")
        M = matrices.l37r_counterexample_matrix((box[0], box[1]))
        if fmt == "csv":
            raise OutOfRange("matrix files are JSON only")
        text = io.write_matrix(M)
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n",
                                  encoding="utf-8")
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="logcvx",
        description="Convex minorants of multi-index sequences, associated "
                    "weight functions, and weight-matrix comparisons.")
    sub = p.add_subparsers(dest="cmd", required=True)

    m = sub.add_parser("minorant", help="largest convex sequence below the data")
    m.add_argument("input")
    m.add_argument("--method", choices=("lp", "sweep", "dual-grid", "oracle"),
                   default="lp")
    m.add_argument("--stability", metavar="LARGER_GRID", default=None,
                   help="recompute on an enclosing grid and compare")
    m.add_argument("--k-step", type=float, default=0.25)
    m.add_argument("--parallel", action="store_true")
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_minorant)

    a = sub.add_parser("assoc", help="weight function omega and its trace")
    a.add_argument("input")
    a.add_argument("--t", action="append", metavar="T1,...,TD",
                   help="evaluate omega at this point (repeatable)")
    a.add_argument("--t-grid", metavar="LO,HI,N", default=None,
                   help="evaluate omega at N geometric points on the diagonal")
    a.add_argument("--trace-k", metavar="K1,...,KD", default=None)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_assoc)

    c = sub.add_parser("check", help="log-convexity and regularity report")
    c.add_argument("input")
    c.add_argument("--s-points", type=int, default=None,
                   help="sample count per axis for the supremum scan")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    mx = sub.add_parser("matrix", help="weight-matrix relations and conditions")
    mxsub = mx.add_subparsers(dest="matrix_cmd", required=True)
    vr = mxsub.add_parser("verify-relation")
    vr.add_argument("M")
    vr.add_argument("N")
    vr.add_argument("--kind", choices=matrices.RELATION_KINDS, required=True)
    vr.add_argument("--witness", required=True)
    vr.add_argument("--json", action="store_true")
    vr.set_defaults(func=cmd_matrix)
    sr = mxsub.add_parser("search-relation")
    sr.add_argument("M")
    sr.add_argument("N")
    sr.add_argument("--kind", choices=matrices.RELATION_KINDS, required=True)
    sr.add_argument("--json", action="store_true")
    sr.set_defaults(func=cmd_matrix)
    vc = mxsub.add_parser("verify-condition")
    vc.add_argument("M")
    vc.add_argument("--cond", choices=matrices.CONDITIONS, required=True)
    vc.add_argument("--witness", required=True)
    vc.add_argument("--json", action="store_true")
    vc.set_defaults(func=cmd_matrix)
    ce = mxsub.add_parser("counterexample")
    ce.add_argument("--n-max", type=int, default=10)
    ce.add_argument("--box", default=None,
                    help="also build the matrix on this box (e.g. 12,12)")
    ce.add_argument("--out", default=None)
    ce.add_argument("--json", action="store_true")
    ce.set_defaults(func=cmd_matrix)

    gn = sub.add_parser("gen", help="write example grids and matrices")
    gn.add_argument("kind", choices=("notconvex", "factorial", "random",
                                     "convex", "log-convex-1d",
                                     "l37r-counterexample"))
    gn.add_argument("--box", default="4,4")
    gn.add_argument("--dim", type=int, default=None)
    gn.add_argument("--n", type=int, default=12)
    gn.add_argument("--seed", type=int, default=0)
    gn.add_argument("--scale", choices=(LOG, EXP), default=EXP)
    gn.add_argument("--amplitude", type=float, default=4.0)
    gn.add_argument("--lift", type=float, default=1.0)
    gn.add_argument("--format", choices=("json", "csv"), default="json")
    gn.add_argument("--out", default=None)
    gn.add_argument("--json", action="store_true")
    gn.set_defaults(func=cmd_gen)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args._echo = argv
    try:
        return args.func(args)
    except SchemaError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return _EXIT_PARSE
    except GridValidationError as e:
        print(f"validation error: {e}", file=sys.stderr)
        for v in e.violations:
            print(f"  at {v.index}: {v.rule}: {v.message}", file=sys.stderr)
        return _EXIT_VALIDATION
    except (NotNormalized, OutOfRange, LogcvxError) as e:
        if isinstance(e, NumericBreakdown):
            print(f"numeric breakdown: {e}", file=sys.stderr)
            return _EXIT_NUMERIC
        print(f"validation error: {e}", file=sys.stderr)
        return _EXIT_VALIDATION
    except OverflowError as e:
        print(f"numeric breakdown: {e}", file=sys.stderr)
        return _EXIT_NUMERIC


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
