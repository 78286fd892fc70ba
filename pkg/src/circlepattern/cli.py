"""Command-line interface.

Exit codes: 0 success / converged, 1 invalid input or failed check,
2 flow collapsed to zero, 3 flow undetermined, 64 usage error.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .complex import (
    ComplexError,
    WeightedComplex,
    character,
    euler_characteristic,
    load_complex,
    parse_angle,
    triangulate,
    validate_b1,
)
from .criteria import (
    MAX_SUBSET_VERTICES,
    CriteriaError,
    check_prescribed,
    check_subset_inequalities,
    classify_character,
)
from .diagnostics import gradient_check
from .flow import FlowConfig, FlowError, FlowStatus, run_flow, write_trajectory_csv
from .geometry import Geometry, curvature_vector, gauss_bonnet_residual, hyperbolic_area

OUTPUT_DIR_ENV = "CIRCLEPATTERN_OUTPUT_DIR"

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_COLLAPSED = 2
EXIT_UNDETERMINED = 3
EXIT_USAGE = 64

_FLOW_EXIT = {
    FlowStatus.CONVERGED: EXIT_OK,
    FlowStatus.COLLAPSED: EXIT_COLLAPSED,
    FlowStatus.UNDETERMINED: EXIT_UNDETERMINED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_vector(path: str, key: str) -> np.ndarray:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ComplexError(f"{path}: JSON parse error at line {exc.lineno}: {exc.msg}") from None
    if isinstance(doc, dict):
        if key not in doc:
            raise ComplexError(f"{path}: missing field {key!r}")
        doc = doc[key]
    if not isinstance(doc, list):
        raise ComplexError(f"{path}: {key!r} must be a list")
    return np.array([parse_angle(x) for x in doc], dtype=float)


def _complex_section(c: WeightedComplex) -> dict[str, Any]:
    b1 = validate_b1(c)
    return {
        "complex": c.summary(),
        "b1": {
            "passed": b1.passed,
            "residuals": b1.residuals.tolist(),
            "tolerances": b1.tolerances.tolist(),
            "max_abs_residual": b1.max_abs_residual,
        },
    }


def _character_section(c: WeightedComplex) -> dict[str, Any]:
    ch = character(c)
    chi = euler_characteristic(c)
    expected = 2 * math.pi * (1 - chi / c.vertex_count)
    return {
        "values": ch.values.tolist(),
        "average": ch.average,
        "average_identity": {
            "expected": expected,
            "residual": ch.average - expected,
            "tolerance": 1e-12,
            "passed": abs(ch.average - expected) <= 1e-12,
        },
    }


def _base_report(command: str, args: argparse.Namespace) -> dict[str, Any]:
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func",)}
    return {
        "tool": {"name": "circlepattern", "version": __version__},
        "command": command,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "config": config,
    }


def _emit(report: dict[str, Any], args: argparse.Namespace) -> None:
    text = json.dumps(report, indent=2, default=_json_default) + "\n"
    out = getattr(args, "out", None)
    if out is None and os.environ.get(OUTPUT_DIR_ENV):
        stem = Path(getattr(args, "path", None) or "gradcheck").stem
        out = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{stem}-{report['command']}.json")
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"not serializable: {type(obj)}")


def cmd_validate(args) -> int:
    c = load_complex(args.path)
    report = _base_report("validate", args)
    report.update(_complex_section(c))
    report["valid"] = True
    _emit(report, args)
    return EXIT_OK if report["b1"]["passed"] else EXIT_INVALID


def cmd_character(args) -> int:
    c = load_complex(args.path)
    report = _base_report("character", args)
    report.update(_complex_section(c))
    report["character"] = _character_section(c)
    if report["b1"]["passed"]:
        report["classification"] = classify_character(c, args.geometry).as_dict()
    _emit(report, args)
    return EXIT_OK if report["b1"]["passed"] else EXIT_INVALID


def _initial_radii(args, n: int):
    if args.radii:
        return _read_vector(args.radii, "radii")
    if args.seed is not None:
        return np.random.default_rng(args.seed).uniform(0.5, 2.0, n)
    return None


def cmd_flow(args) -> int:
    c = load_complex(args.path)
    g = Geometry.parse(args.geometry)
    target = _read_vector(args.prescribed, "curvature") if args.prescribed else None
    cfg = FlowConfig(
        geometry=g, target=target, initial_radii=_initial_radii(args, c.vertex_count),
        abs_tol=args.abs_tol, rel_tol=args.rel_tol, convergence_eps=args.eps,
        max_time=args.max_time,
    )
    result = run_flow(c, cfg)
    tri = triangulate(c)
    report = _base_report("flow", args)
    report.update(_complex_section(c))
    report["character"] = _character_section(c)
    report["classification"] = classify_character(c, g).as_dict()
    if target is not None:
        report["prescribed"] = check_prescribed(c, g, target).as_dict()
    radii = result.final_radii
    rate = result.rate_estimate
    report["flow"] = {
        "status": result.status.value,
        "time": result.time,
        "steps": result.steps,
        "rejected_steps": result.rejected_steps,
        "function_evaluations": result.function_evaluations,
        "message": result.message,
        "final_radii": radii.tolist(),
        "final_log_radii": result.final_log_radii.tolist(),
        "final_curvature": result.final_curvature.values.tolist(),
        "target_curvature": result.final_curvature.target.tolist(),
        "gap_supnorm": {"value": result.gap_supnorm, "tolerance": cfg.convergence_eps},
        "rate_estimate": None if rate is None else {
            "quantity": rate.quantity, "slope": rate.slope, "r_squared": rate.r_squared,
            "samples": rate.samples,
        },
        "conservation": {
            "applicable": result.conservation.applicable,
            "max_drift": result.conservation.max_drift if result.conservation.applicable else None,
            "tolerance": result.conservation.threshold if result.conservation.applicable else None,
            "passed": result.conservation.passed,
        },
    }
    if np.all(radii > 0) and (g is Geometry.EUCLIDEAN or np.all(radii <= 40)):
        gb = gauss_bonnet_residual(c, tri, g, radii)
        gb_tol = 1e-9 if g is Geometry.EUCLIDEAN else 1e-8
        report["gauss_bonnet"] = {"residual": gb, "tolerance": gb_tol, "passed": abs(gb) < gb_tol}
        if g is Geometry.HYPERBOLIC:
            report["gauss_bonnet"]["area"] = hyperbolic_area(tri, radii)
    if args.traj:
        write_trajectory_csv(result.trajectory, args.traj)
    _emit(report, args)
    return _FLOW_EXIT[result.status]


def cmd_criteria(args) -> int:
    c = load_complex(args.path)
    g = Geometry.parse(args.geometry)
    report = _base_report("criteria", args)
    report.update(_complex_section(c))
    report["character"] = _character_section(c)
    report["classification"] = classify_character(c, g).as_dict()
    kvec = None
    if args.prescribed:
        kvec = _read_vector(args.prescribed, "curvature")
        report["prescribed"] = check_prescribed(c, g, kvec).as_dict()
    elif args.radii:
        radii = _read_vector(args.radii, "radii")
        kvec = curvature_vector(triangulate(c), g, radii).values
        report["curvature_from_radii"] = kvec.tolist()
    subsets = []
    if c.vertex_count <= MAX_SUBSET_VERTICES:
        modes = ["ghz-h3"] if g is Geometry.HYPERBOLIC else ["ghz-e3"]
        if kvec is not None:
            modes.append("bs-hyperbolic" if g is Geometry.HYPERBOLIC else "bs-euclidean")
        for mode in modes:
            subsets.append(check_subset_inequalities(c, mode, kvec).as_dict())
    else:
        report["subset_note"] = f"subset checks skipped: N > {MAX_SUBSET_VERTICES}"
    report["subset_inequalities"] = subsets
    _emit(report, args)
    return EXIT_OK


def cmd_gradcheck(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be a positive integer")
    results = gradient_check(args.samples, args.seed)
    report = _base_report("gradcheck", args)
    report["results"] = [
        {"geometry": r.geometry.value, "samples": r.samples, "max_rel_error": r.max_rel_error,
         "tolerance": r.threshold, "worst_sample": list(r.worst_sample),
         "signs_ok": r.signs_ok, "passed": r.passed}
        for r in results
    ]
    _emit(report, args)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.geometry.value:<11} samples={r.samples} max_rel_err={r.max_rel_error:.3e} {status}",
              file=sys.stderr)
    return EXIT_OK if all(r.passed for r in results) else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="circlepattern", description=(
        "Existence criteria and combinatorial Ricci flows for ideal circle patterns. "
        f"Reports go to stdout, to --out, or into ${OUTPUT_DIR_ENV} when set."))
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, geometry=False):
        p.add_argument("path", help="decomposition document (JSON)")
        p.add_argument("--out", help="write the report here instead of stdout")
        if geometry:
            p.add_argument("--geometry", choices=[g.value for g in Geometry], default="hyperbolic")

    p = sub.add_parser("validate", help="check the decomposition and the face angle sums")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("character", help="vertex characters and their classification")
    common(p, geometry=True)
    p.set_defaults(func=cmd_character)

    p = sub.add_parser("flow", help="run a combinatorial Ricci flow")
    common(p, geometry=True)
    p.add_argument("--prescribed", help="JSON file with target curvatures {\"curvature\": [...]}")
    p.add_argument("--radii", help="JSON file with initial radii {\"radii\": [...]}")
    p.add_argument("--seed", type=int, help="random initial radii in [0.5, 2] from this seed")
    p.add_argument("--abs-tol", type=float, default=1e-10)
    p.add_argument("--rel-tol", type=float, default=1e-10)
    p.add_argument("--eps", type=float, default=1e-10, help="convergence threshold on max |K - target|")
    p.add_argument("--max-time", type=float, default=500.0)
    p.add_argument("--traj", help="write the sampled trajectory as CSV")
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("criteria", help="all applicable existence criteria")
    common(p, geometry=True)
    p.add_argument("--prescribed", help="JSON file with target curvatures")
    p.add_argument("--radii", help="JSON file with radii; their curvatures feed the subset checks")
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("gradcheck", help="analytic vs finite-difference angle gradients")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_gradcheck)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"circlepattern: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ComplexError, FlowError, CriteriaError, ValueError, OSError) as exc:
        print(f"circlepattern: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
