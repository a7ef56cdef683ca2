"""Command-line front end: matrix and weight ingestion, one subcommand per
analysis operation, JSON/CSV reports, and SVG diagrams.

Reports embed their exact inputs as rational strings and are byte-identical
across runs for the same configuration. Exit codes: 0 success (or "unique"),
1 negative mathematical verdict (non-unique design, uncertified solve),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from .analysis import (
    _certificate_dict,
    _json_scalar,
    accessible_sign_vectors,
    accessible_slope_models,
    check_uniqueness,
    check_uniqueness_bp,
    classify_response,
    genericity_experiment,
)
from .exact import load_matrix, parse_rational, rank, rat_str, vec
from .geometry import CapExceeded, enumerate_models, model_of
from .norms import SLOPE, PolytopeNorm, dual_ball_membership, l1_norm, slope_norm, sup_norm
from .solvers import SolverOptions, solve_bp, solve_penalized

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2

_CAP_ENV = {
    "models": "PENGEOM_MODEL_LIMIT",
    "signs": "PENGEOM_SIGN_LIMIT",
    "vertices": "PENGEOM_VERTEX_CAP",
}


class CliError(Exception):
    """Bad arguments or inputs; maps to exit code 2."""


def _parse_rational_list(text: str) -> tuple[Fraction, ...]:
    items = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(parse_rational(t) for t in items)


def _pattern_limit(args, family: str) -> int | None:
    if args.cap is not None:
        if args.cap <= 0:
            raise CliError("--cap must be positive")
        return args.cap
    raw = os.environ.get(_CAP_ENV[family])
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"{_CAP_ENV[family]} must be an integer") from None
    if value <= 0:
        raise CliError(f"{_CAP_ENV[family]} must be positive")
    return value


def _vertex_cap() -> int | None:
    raw = os.environ.get(_CAP_ENV["vertices"])
    if raw is None:
        return None
    value = int(raw)
    if value <= 0:
        raise CliError(f"{_CAP_ENV['vertices']} must be positive")
    return value


def _analysis_caps(args, family: str) -> dict:
    caps = {"limit": _pattern_limit(args, family)}
    vcap = _vertex_cap()
    if vcap is not None:
        caps["vertex_cap"] = vcap
    return caps


def _build_norm(args, dim: int) -> PolytopeNorm:
    if args.norm is None:
        raise CliError("--norm is required here")
    if args.norm == "slope":
        if args.weights is None:
            raise CliError("--norm slope needs --weights")
        if args.lam is not None:
            raise CliError("--lambda does not apply to the slope norm")
        if len(args.weights) != dim:
            raise CliError(f"got {len(args.weights)} weights for {dim} columns")
        return slope_norm(args.weights)
    if args.weights is not None:
        raise CliError("--weights only applies to --norm slope")
    if args.norm == "l1":
        return l1_norm(dim, scale=args.lam if args.lam is not None else 1)
    if args.lam is not None:
        raise CliError("--lambda does not apply to the sup norm")
    return sup_norm(dim)


def _require_format(args, allowed: tuple[str, ...]) -> str:
    fmt = args.format if args.format is not None else allowed[0]
    if fmt not in allowed:
        raise CliError(f"--format {fmt} is not available here (use {' or '.join(allowed)})")
    return fmt


def _echo_inputs(args, X=None, norm=None, y=None) -> dict:
    d: dict = {}
    if X is not None:
        d["matrix"] = X.to_json_rows()
    if norm is not None:
        d["norm"] = norm.describe()
    if y is not None:
        d["response"] = [rat_str(t) for t in y]
    if getattr(args, "mode", None) is not None:
        d["mode"] = args.mode
    if args.cap is not None:
        d["cap"] = args.cap
    return d


def _emit_text(args, text: str) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict) -> None:
    _emit_text(args, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _load_required_matrix(args):
    if args.matrix is None:
        raise CliError("--matrix is required here")
    return load_matrix(args.matrix)


def _require_response(args):
    if args.response is None:
        raise CliError("--response is required here")
    return vec(args.response)


def _forbid_norm_flags(args, why: str) -> None:
    if args.norm is not None or args.weights is not None or args.lam is not None:
        raise CliError(why)


def cmd_uniqueness(args) -> int:
    _require_format(args, ("json",))
    X = _load_required_matrix(args)
    if args.mode == "bp":
        _forbid_norm_flags(args, "bp mode fixes the l1 norm; drop --norm/--weights/--lambda")
        report = check_uniqueness_bp(X, **_analysis_caps(args, "signs"))
        norm = None
    else:
        norm = _build_norm(args, X.ncols)
        family = "models" if norm.kind == SLOPE else "signs"
        report = check_uniqueness(X, norm, **_analysis_caps(args, family))
    payload = {
        "command": "uniqueness",
        "inputs": _echo_inputs(args, X=X, norm=norm),
        "report": report.to_json_dict(),
    }
    _emit_json(args, payload)
    return EXIT_OK if report.unique_for_all_y else EXIT_NEGATIVE


def cmd_accessible(args) -> int:
    _require_format(args, ("json",))
    X = _load_required_matrix(args)
    if args.norm == "sup":
        raise CliError("accessibility sweeps exist for the l1 and slope norms")
    norm = _build_norm(args, X.ncols)
    if norm.kind == SLOPE:
        reports = accessible_slope_models(X, args.weights, **_analysis_caps(args, "models"))
    else:
        reports = accessible_sign_vectors(
            X, lam=norm.scale, **_analysis_caps(args, "signs")
        )
    payload = {
        "command": "accessible",
        "inputs": _echo_inputs(args, X=X, norm=norm),
        "accessible_count": sum(1 for r in reports if r.accessible),
        "pattern_count": len(reports),
        "patterns": [r.to_json_dict() for r in reports],
    }
    _emit_json(args, payload)
    return EXIT_OK


def _float_solution_payload(X, y, sol, norm) -> dict:
    fitted = X.to_float_array() @ [float(v) for v in sol.point]
    residual = [float(t) - f for t, f in zip(y, fitted)]
    if norm.kind == SLOPE:
        pattern = model_of(sol.point, tol=1e-6)
    else:
        pattern = tuple(0 if abs(v) <= 1e-6 else (1 if v > 0 else -1) for v in sol.point)
    return {
        "solution": [float(v) for v in sol.point],
        "objective": float(sol.objective),
        "pattern": list(pattern),
        "residual": [float(v) for v in residual],
        "route": sol.route,
        "iterations": sol.iterations,
        "converged": sol.converged,
        "certificate": _certificate_dict(sol.certificate),
    }


def cmd_solve(args) -> int:
    _require_format(args, ("json",))
    X = _load_required_matrix(args)
    y = _require_response(args)
    if len(y) != X.nrows:
        raise CliError(f"response has {len(y)} entries for {X.nrows} rows")
    payload: dict = {"command": "solve"}
    if args.mode == "bp":
        _forbid_norm_flags(args, "bp mode fixes the l1 norm; drop --norm/--weights/--lambda")
        payload["inputs"] = _echo_inputs(args, X=X, y=y)
        sol = solve_bp(X, y)
        payload["result"] = {
            "solution": [_json_scalar(v) for v in sol.point],
            "objective": _json_scalar(sol.objective),
            "route": sol.route,
            "certificate": _certificate_dict(sol.certificate),
        }
        _emit_json(args, payload)
        return EXIT_OK
    norm = _build_norm(args, X.ncols)
    payload["inputs"] = _echo_inputs(args, X=X, norm=norm, y=y)
    if norm.kind == SLOPE and norm.weights.strict:
        try:
            cls = classify_response(X, norm.weights.values, y)
        except RuntimeError:
            sol = solve_penalized(X, y, norm)  # dump the uncertified iterate
            payload["result"] = _float_solution_payload(X, y, sol, norm)
            _emit_json(args, payload)
            return EXIT_NEGATIVE
        payload["result"] = cls.to_json_dict()
        _emit_json(args, payload)
        return EXIT_OK
    sol = solve_penalized(X, y, norm)
    payload["result"] = _float_solution_payload(X, y, sol, norm)
    _emit_json(args, payload)
    return EXIT_OK if sol.converged else EXIT_NEGATIVE


def cmd_decompose(args) -> int:
    _require_format(args, ("json",))
    if args.mode == "bp":
        raise CliError("decompose applies to the penalized problem; drop --mode bp")
    X = _load_required_matrix(args)
    y = _require_response(args)
    if len(y) != X.nrows:
        raise CliError(f"response has {len(y)} entries for {X.nrows} rows")
    norm = _build_norm(args, X.ncols)
    payload: dict = {"command": "decompose", "inputs": _echo_inputs(args, X=X, norm=norm, y=y)}
    if dual_ball_membership(norm, X.rmatvec(y)):
        # response already inside the zero-solution region: nothing to fit
        result = {
            "projection": [rat_str(t) for t in y],
            "fitted": [rat_str(Fraction(0)) for _ in y],
            "pattern": [0] * X.ncols,
            "exact": True,
        }
        payload["result"] = result
        _emit_json(args, payload)
        return EXIT_OK
    sol = solve_penalized(X, y, norm)
    fitted = X.to_float_array() @ [float(v) for v in sol.point]
    projection = [float(t) - f for t, f in zip(y, fitted)]
    if norm.kind == SLOPE:
        pattern = model_of(sol.point, tol=1e-6)
    else:
        pattern = tuple(0 if abs(v) <= 1e-6 else (1 if v > 0 else -1) for v in sol.point)
    payload["result"] = {
        "projection": [float(v) for v in projection],
        "fitted": [float(v) for v in fitted],
        "pattern": list(pattern),
        "exact": False,
        "certificate": _certificate_dict(sol.certificate),
    }
    _emit_json(args, payload)
    return EXIT_OK if sol.converged else EXIT_NEGATIVE


def cmd_models(args) -> int:
    _require_format(args, ("json",))
    if args.cols is not None:
        p = args.cols
    elif args.matrix is not None:
        p = load_matrix(args.matrix).ncols
    else:
        raise CliError("--cols (or --matrix) sets the dimension")
    limit = _pattern_limit(args, "models")
    models = enumerate_models(p) if limit is None else enumerate_models(p, limit=limit)
    payload = {
        "command": "models",
        "dimension": p,
        "count": len(models),
        "models": [list(m) for m in models],
    }
    _emit_json(args, payload)
    return EXIT_OK


def cmd_genericity(args) -> int:
    fmt = _require_format(args, ("json", "csv"))
    if args.rows is None or args.cols is None:
        raise CliError("--rows and --cols are required here")
    if args.mode == "bp":
        _forbid_norm_flags(args, "bp mode fixes the l1 norm; drop --norm/--weights/--lambda")
        norm = None
        mode = "bp"
    else:
        norm = _build_norm(args, args.cols)
        mode = "penalized"
    report = genericity_experiment(
        args.rows,
        args.cols,
        norm=norm,
        mode=mode,
        trials=args.trials,
        seed=args.seed,
        limit=_pattern_limit(args, "models"),
    )
    if fmt == "csv":
        lines = ["trial,unique"]
        lines += [f"{i},{int(u)}" for i, u in enumerate(report.outcomes)]
        _emit_text(args, "\n".join(lines) + "\n")
        return EXIT_OK
    payload = {
        "command": "genericity",
        "inputs": {"mode": args.mode, "seed": args.seed, "trials": args.trials},
        "report": report.to_json_dict(),
    }
    if norm is not None:
        payload["inputs"]["norm"] = norm.describe()
    _emit_json(args, payload)
    return EXIT_OK


def cmd_plot(args) -> int:
    from .svg import dual_ball_figure, response_region_figure

    _require_format(args, ("svg",))
    X = load_matrix(args.matrix) if args.matrix is not None else None
    if X is not None:
        dim = X.ncols
    elif args.weights is not None:
        dim = len(args.weights)
    elif args.cols is not None:
        dim = args.cols
    else:
        raise CliError("--matrix, --weights, or --cols sets the dimension")
    norm = _build_norm(args, dim)
    if X is not None and X.nrows == 2 and rank(X) == 2:
        figure = response_region_figure(X, norm)
    elif norm.dim == 2:
        figure = dual_ball_figure(norm, X)
    else:
        raise CliError(
            "unsupported dimension: need two columns for a dual-ball figure "
            "or two independent rows for a response-region figure"
        )
    _emit_text(args, figure + "\n")
    return EXIT_OK


_DISPATCH = {
    "uniqueness": cmd_uniqueness,
    "accessible": cmd_accessible,
    "solve": cmd_solve,
    "decompose": cmd_decompose,
    "models": cmd_models,
    "genericity": cmd_genericity,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--matrix", help="CSV (or JSON) file, one row per matrix row")
    shared.add_argument("--weights", type=_parse_rational_list, metavar="LIST",
                        help="comma-separated slope weights, e.g. 5.5,3.5,1.5")
    shared.add_argument("--norm", choices=("l1", "sup", "slope"))
    shared.add_argument("--lambda", dest="lam", type=parse_rational, metavar="Q",
                        help="l1 penalty scale (rational or decimal literal)")
    shared.add_argument("--mode", choices=("pen", "bp"), default="pen")
    shared.add_argument("--response", type=_parse_rational_list, metavar="LIST",
                        help="comma-separated response vector")
    shared.add_argument("--trials", type=int, default=100)
    shared.add_argument("--seed", type=int, default=0)
    shared.add_argument("--rows", type=int, help="row count for genericity trials")
    shared.add_argument("--cols", type=int, help="column count / ambient dimension")
    shared.add_argument("--cap", type=int, help="pattern enumeration cap")
    shared.add_argument("--out", help="output path (default: stdout)")
    shared.add_argument("--format", choices=("json", "csv", "svg"))

    parser = argparse.ArgumentParser(
        prog="pengeom",
        description="Exact uniqueness and accessibility analysis for "
        "polyhedral-penalized least squares and basis pursuit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("uniqueness", parents=[shared],
                   help="is the minimizer unique for every response")
    sub.add_parser("accessible", parents=[shared],
                   help="which sign vectors or models some response realizes")
    sub.add_parser("solve", parents=[shared], help="solve at one response, certified")
    sub.add_parser("decompose", parents=[shared],
                   help="split a response into fitted part plus projected remainder")
    sub.add_parser("models", parents=[shared], help="enumerate sign/cluster models")
    sub.add_parser("genericity", parents=[shared],
                   help="uniqueness frequency over random Gaussian designs")
    sub.add_parser("plot", parents=[shared], help="SVG diagram (dual ball or response region)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        return _DISPATCH[args.command](args)
    except (CliError, CapExceeded, ValueError, ArithmeticError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    finally:
        print(f"elapsed {time.perf_counter() - started:.3f}s", file=sys.stderr)


if __name__ == "__main__":
    sys.exit(main())
