"""Command-line front end.

Exit codes: 0 success, 1 a checked property failed, 2 usage or input error.
Every command except eval-h (which prints the bare value with 17
significant digits) prints a JSON run report on stdout (keys sorted, no timing, so
identical inputs give byte-identical reports); wall time goes to stderr.
Factor indices are 0-based.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import checks
from .checks import Outcome, _plain, summarize
from .cross import decompose_check, in_center, in_cross, path_to_center, sample_cross
from .errors import NKCrossError
from .extend import (FUNCTION_NAMES, blowup_check, check_sep_holo, compare_on_hull, extend_poly,
                     extend_rational, make_function)
from .extremal import closed_form_kind, h_closed_form, h_eval, h_grid_solve
from .geometry import as_complex
from .hull import (CompositeHull2, composite_hull2_value, hull_value, in_hull, lemma_inc_value, sample_hull,
                   shrink_toward_center, slice_grid)
from .scene import canonical_json, load_scene

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """``"re,im"``, a Python complex literal (``0.5j``, ``1-2j``) or a JSON ``[re, im]``."""
    text = text.strip()
    try:
        if text.startswith("["):
            return as_complex(json.loads(text))
        if "," in text:
            re_, im_ = text.split(",")
            return as_complex(complex(float(re_), float(im_)))
        return as_complex(complex(text.replace(" ", "")))
    except (ValueError, TypeError, json.JSONDecodeError):
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_point(text: str) -> np.ndarray:
    """JSON list of coordinates, each ``[re, im]``, a real number or a string such as ``"0.5j"``."""
    try:
        obj = json.loads(text)
        return np.array([as_complex(c) for c in obj], dtype=complex)
    except (ValueError, TypeError, json.JSONDecodeError):
        raise UsageError(f"cannot parse point {text!r}; expected e.g. '[[0,0],[0,0.5],[0,0.5]]'") from None


def _report(command: str, args, scene, outcomes, payload) -> dict:
    inputs = {"command": command, "scene": scene.source if scene is not None else None,
              "args": {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}}
    return {"command": command,
            "inputs_digest": hashlib.sha256(canonical_json(_plain(inputs)).encode()).hexdigest(),
            "seed": args.seed,
            "passed": summarize(outcomes),
            "outcomes": [o.to_json() for o in outcomes],
            "payload": _plain(payload)}


def _out_dir(args) -> Path | None:
    if not args.out:
        return None
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _factor(scene, j: int):
    if not 0 <= j < scene.spec.N:
        raise UsageError(f"factor index {j} out of range 0..{scene.spec.N - 1}")
    return scene.spec.pairs[j]


# ---- commands ---------------------------------------------------------------------------------

def cmd_eval_h(args, scene):
    pair = _factor(scene, args.factor)
    z = parse_complex(args.z)
    v = h_eval(pair, z, args.strategy, grid=scene.grid, tol=scene.solver_tol)
    return [], {"factor": args.factor, "z": z, "h": float(v), "strategy": args.strategy}


def cmd_solve_h(args, scene):
    pair = _factor(scene, args.factor)
    n = args.grid or scene.grid
    field = h_grid_solve(pair, n, n, args.tol or scene.solver_tol)
    payload = {"factor": args.factor, "grid": n, "sweeps": field.sweeps, "residual": field.residual,
               "backend": field.backend}
    outcomes = [Outcome("residual below tolerance", field.residual <= field.tol, {"residual": field.residual})]
    if closed_form_kind(pair) is not None:
        Z = field.nodes()
        inside = field.interior()
        err = float(np.max(np.abs(field.values[inside] - h_closed_form(pair, Z[inside]))))
        payload["sup_error_vs_closed_form"] = err
        outcomes.append(Outcome("sup node error vs closed form <= 5e-3", err <= checks.GRID_TOL, {"sup_error": err}))
    out = _out_dir(args)
    if out:
        path = out / f"field_{args.factor}.csv"
        field.to_csv(path)
        payload["csv"] = path.name
    return outcomes, payload


def cmd_cross_test(args, scene):
    spec = scene.spec
    z = parse_point(args.point)
    rep = in_cross(spec, z)
    payload = {"point": z, "variant": spec.variant, "k": spec.k, **rep.to_json(),
               "center": in_center(spec, z)}
    if spec.variant == "X":
        if spec.N > 2 and 2 <= spec.k <= spec.N - 1:
            payload["decomposition"] = list(decompose_check(spec, z))
        if rep.member:
            payload["path_to_center"] = [list(v) for v in path_to_center(spec, z)]
    return [], payload


def cmd_hull_test(args, scene):
    spec = scene.spec
    z = parse_point(args.point)
    margin = args.margin if args.margin is not None else scene.margin
    v = hull_value(spec, z, args.strategy)
    decision = in_hull(spec, z, args.strategy, margin)
    payload = {"point": z, "k": spec.k, "hull_value": v,
               "member": "indeterminate" if decision is None else decision}
    for variant in ("Z", "Zs"):
        try:
            c = CompositeHull2(spec, variant)
            val = composite_hull2_value(c, z, args.strategy)
            payload[f"composite_{variant}"] = {"factor": c.factor, "value": val, "member": val < 1}
        except NKCrossError as exc:
            payload[f"composite_{variant}"] = {"unavailable": str(exc)}
    return [], payload


def cmd_lemma_inc(args, scene):
    z = parse_point(args.point)
    k = args.order or scene.spec.k
    v = lemma_inc_value(scene.spec, z, k, args.strategy)
    return [Outcome("value < 1", v < 1, {"value": v})], {"point": z, "order": k, "value": v}


def cmd_sample(args, scene):
    spec = scene.spec
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    if args.kind == "hull":
        Z = sample_hull(spec, args.count, args.seed, args.strategy)
    else:
        Z = sample_cross(spec, args.count, np.random.default_rng(args.seed))
    pts = [[[c.real, c.imag] for c in z] for z in Z]
    payload = {"kind": args.kind, "count": args.count}
    out = _out_dir(args)
    if out:
        path = out / f"samples_{args.kind}.json"
        path.write_text(json.dumps(pts) + "\n")
        payload["json"] = path.name
    else:
        payload["points"] = pts
    return [], payload


def cmd_slice(args, scene):
    fixed = parse_point(args.fixed)
    if args.resolution < 2:
        raise UsageError("--resolution must be at least 2")
    s = slice_grid(scene.spec, args.factor, fixed, args.resolution, args.strategy)
    finite = s.values[np.isfinite(s.values)]
    payload = {"factor": args.factor, "resolution": args.resolution,
               "min": float(finite.min()), "max": float(finite.max())}
    out = _out_dir(args)
    if out:
        path = out / f"slice_{args.factor}.csv"
        s.to_csv(path)
        payload["csv"] = path.name
    return [], payload


def cmd_extend(args, scene):
    spec = scene.spec
    try:
        tf = make_function(args.function, spec)
    except ValueError as exc:
        raise UsageError(f"{exc}; known: {', '.join(FUNCTION_NAMES)}") from None
    try:
        degrees = tuple(int(d) for d in args.degrees.split(","))
    except ValueError:
        raise UsageError("--degrees must be comma-separated integers") from None
    if len(degrees) == 1:
        degrees = degrees * spec.N
    if len(degrees) != spec.N:
        raise UsageError(f"need {spec.N} degree bounds")
    holo = check_sep_holo(tf.func, seed=args.seed)
    outcomes = [Outcome("separately holomorphic on the cross", holo.passed,
                        {a: v["scaled_residual"] for a, v in holo.per_alpha.items()})]
    payload = {"function": args.function, "degrees": degrees}
    if not holo.passed:
        return outcomes, payload
    if tf.denominator is not None:
        ext = extend_rational(tf.func, tf.denominator, degrees, args.budget, args.seed, args.total_degree)
        payload["mhat"] = ext.mhat.to_json()
        payload["blowup"] = blowup_check(ext)
        outcomes.append(Outcome("M-hat on the cross lies in the exclusion set", ext.mhat.consistent))
        outcomes.append(Outcome("blow-up next to M-hat", payload["blowup"]["passed"], payload["blowup"]))
        poly = ext.numerator
    else:
        ext = poly = extend_poly(tf.func, degrees, args.budget, args.seed, args.total_degree)
    payload.update(residual=poly.residual, cond=poly.cond, n_samples=poly.n_samples, method=poly.method)
    H = shrink_toward_center(spec, sample_hull(spec, args.hull_samples, args.seed + 1, "auto"), 0.8)
    if tf.denominator is not None:
        keep = np.abs(tf.denominator.evaluate_full(H)) > 1e-3
        H = H[keep]
    stats = compare_on_hull(ext, tf.func, H)
    payload["hull_comparison"] = stats
    if tf.coeffs is not None:
        c = np.zeros(poly.coeffs.shape, dtype=complex)
        sl = tuple(slice(0, min(a, b)) for a, b in zip(c.shape, tf.coeffs.shape))
        c[sl] = tf.coeffs[sl]
        payload["coef_error"] = float(np.abs(poly.raw_coefficients() - c).max())
        outcomes.append(Outcome("residual <= 1e-10", poly.residual <= 1e-10, {"residual": poly.residual}))
    out = _out_dir(args)
    if out:
        (out / "extension.json").write_text(json.dumps(_plain(ext.to_json()), sort_keys=True) + "\n")
        with open(out / "hull_errors.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["index", "abs_error", "rel_error"])
            if len(H):
                a, b = ext(H), tf.func(H)
                for i, (x, y) in enumerate(zip(a, b)):
                    e = abs(x - y)
                    w.writerow([i, f"{e:.17g}", f"{e / max(abs(y), 1e-300):.17g}"])
        payload["exports"] = ["extension.json", "hull_errors.csv"]
    return outcomes, payload


def cmd_verify_suite(args, scene):
    if args.sizes < 1:
        raise UsageError("--sizes must be positive")
    spec = scene.spec
    rng = np.random.default_rng(args.seed)
    outcomes = []
    outcomes += checks.extremal_battery(spec, scene.grid, scene.solver_tol)
    outcomes += checks.cross_battery(spec, args.sizes, rng)
    outcomes += checks.hull_battery(spec, args.sizes, args.seed)
    outcomes += checks.lemma_battery(spec, min(args.sizes, 1000), args.seed)
    outcomes += checks.extend_battery(spec, args.seed)
    return outcomes, {"sizes": args.sizes, "checks": len(outcomes)}


def cmd_reproduce_example(args, scene):
    w = None if args.w is None else parse_complex(args.w)
    margin = args.margin if args.margin is not None else 1e-6
    outcomes, payload = checks.worked_example(w, args.strategy if args.strategy != "auto" else "closed", margin)
    return outcomes, payload


COMMANDS = {
    "eval-h": cmd_eval_h, "solve-h": cmd_solve_h, "cross-test": cmd_cross_test, "hull-test": cmd_hull_test,
    "lemma-inc": cmd_lemma_inc, "sample": cmd_sample, "slice": cmd_slice, "extend": cmd_extend,
    "verify-suite": cmd_verify_suite, "reproduce-example": cmd_reproduce_example,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scene", default=None,
                        help="scene JSON path or builtin:<name> (default builtin:three-intervals)")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--strategy", choices=("closed", "field", "auto"), default="auto")
    common.add_argument("--margin", type=float, default=None, help="indeterminate band for field decisions")
    common.add_argument("--out", default=None, help="directory for CSV/JSON exports and the report")

    ap = argparse.ArgumentParser(prog="nkcross", description="Crosses, hulls and extensions on planar factors.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-h", parents=[common], help="evaluate one factor's extremal function")
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--z", required=True, help="'re,im' or a complex literal such as 0.5j")

    p = sub.add_parser("solve-h", parents=[common], help="grid solve for one factor and export the field")
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)

    for name, helptext in (("cross-test", "cross membership report"), ("hull-test", "hull membership report")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--point", required=True, help="JSON list of coordinates")

    p = sub.add_parser("lemma-inc", parents=[common], help="envelope between consecutive hulls at a point")
    p.add_argument("--point", required=True)
    p.add_argument("--order", type=int, default=None)

    p = sub.add_parser("sample", parents=[common], help="seeded hull or cross samples")
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--kind", choices=("hull", "cross"), default="hull")

    p = sub.add_parser("slice", parents=[common], help="hull value on one factor with the others frozen")
    p.add_argument("--factor", type=int, required=True)
    p.add_argument("--fixed", required=True, help="JSON list of the N-1 frozen coordinates")
    p.add_argument("--resolution", type=int, default=101)

    p = sub.add_parser("extend", parents=[common], help="fit an extension of a registry function")
    p.add_argument("--function", required=True, help=", ".join(FUNCTION_NAMES))
    p.add_argument("--degrees", default="2")
    p.add_argument("--total-degree", type=int, default=None)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--hull-samples", type=int, default=1000)

    p = sub.add_parser("verify-suite", parents=[common], help="run the invariant batteries on a scene")
    p.add_argument("--sizes", type=int, default=10000)

    p = sub.add_parser("reproduce-example", parents=[common], help="the three-factor counterexample point")
    p.add_argument("--w", default=None, help="replace i/sqrt(3) by another coordinate value")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    t0 = time.perf_counter()
    try:
        scene = load_scene(args.scene)
        outcomes, payload = COMMANDS[args.command](args, scene)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NKCrossError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = _report(args.command, args, scene, outcomes, payload)
    text = json.dumps(report, sort_keys=True, indent=2)
    # eval-h prints the bare value; its report goes to --out only
    print(f"{payload['h']:.17g}" if args.command == "eval-h" else text)
    out = _out_dir(args)
    if out:
        (out / f"report_{args.command}.json").write_text(text + "\n")
    print(f"wall time {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
