"""Acceptance criteria, one test each, at the stated sizes and tolerances.

Every criterion prints a single ``[PASS]``/``[FAIL]`` line with its wall time;
under pytest the lines are repeated in the terminal summary.  Run directly
with ``python3 tests/test_acceptance.py`` to get only the lines.
"""
from __future__ import annotations

import math
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import exact_example_values  # noqa: E402
from nkcross import checks  # noqa: E402
from nkcross.cross import CrossSpec, sample_ambient  # noqa: E402
from nkcross.extend import (blowup_check, check_sep_holo, compare_on_hull, extend_poly,  # noqa: E402
                            extend_rational, make_function)
from nkcross.geometry import unit_interval_pair  # noqa: E402
from nkcross.hull import hull_mask, sample_hull, shrink_toward_center  # noqa: E402
from nkcross.scene import load_scene  # noqa: E402

SEED = 20240601
P = unit_interval_pair()


def _fails(outcomes):
    return [f"{o.name}: {o.detail}" for o in outcomes if not o.passed]


def criterion_1():
    outcomes, payload = checks.worked_example()
    ref = exact_example_values()
    ok = (not _fails(outcomes) and payload["hull_value_exact"] == ref["hull"]
          and payload["zs_value_exact"] == ref["composite"]
          and abs(payload["hull_value"] - 4 / 3) <= 1e-12 and abs(payload["zs_value"] - 4 / 3) <= 1e-12)
    return ok, f"hull {payload['hull_value']:.17g}, composite {payload['zs_value']:.17g}"


def criterion_2():
    outs = [checks.solver_vs_closed_form(p, 513, 1e-10) for p in checks.catalog_pairs()]
    detail = ", ".join(f"{o.name.split('[')[1].split(']')[0]} sup err {o.detail['sup_error']:.2e}" for o in outs)
    return not _fails(outs), detail


def criterion_3():
    rng = np.random.default_rng(SEED)
    spec = load_scene("builtin:three-intervals-Y").spec
    outs = checks.cross_battery(spec, 10_000, rng)
    X4 = CrossSpec((P,) * 4, 2, "X")
    outs.append(checks.decomposition_identity(X4.pairs, sample_ambient(X4, 10_000, rng, p_base=0.6)))
    outs.append(checks.merge_roundtrip(4, rng))
    fails = _fails(outs)
    return not fails, "; ".join(fails) or f"{len(outs)} identities on 10^4 samples"


def criterion_4():
    outs = []
    for N in (3, 4):
        outs += checks.hull_battery(CrossSpec((P,) * N, 2, "X"), 10_000, SEED + N, "closed")
    fails = _fails(outs)
    agree = [o.detail for o in outs if o.name.startswith("composite")]
    return not fails, "; ".join(fails) or " ".join(
        f"N={d['N']}: {d['disagreements']} disagreements / {d['samples']}" for d in agree)


def criterion_5():
    outs = checks.lemma_battery(CrossSpec((P,) * 3, 2, "X"), 1000, SEED)
    fails = _fails(outs)
    worst = outs[-1].detail.get("worst_defect")
    return not fails, "; ".join(fails) or f"worst sub-mean defect {worst:.2e} on {outs[-1].detail['circles']} circles"


def criterion_6():
    X = CrossSpec((P,) * 3, 2, "X")
    parts = {}
    # (a) dense degree-(2,2,2) polynomial from stratified cross samples
    tf = make_function("poly222", X)
    ext = extend_poly(tf.func, (2, 2, 2), seed=SEED)
    parts["a"] = float(np.abs(ext.raw_coefficients() - tf.coeffs).max()) <= 1e-8, \
        f"coef err {np.abs(ext.raw_coefficients() - tf.coeffs).max():.1e}"
    # (b) 1/(3 - z1 - z2 - z3) on 10^3 hull samples shrunk by 0.8
    H = shrink_toward_center(X, sample_hull(X, 1000, SEED + 1, "closed"), 0.8)
    geom = make_function("geom", X).func
    ext_b = extend_poly(geom, (14, 14, 14), total_degree=28, seed=SEED)
    rel = compare_on_hull(ext_b, geom, H)["max_rel"]
    parts["b"] = rel <= 1e-4, f"sup rel err {rel:.1e}"
    # (c) two independent seeds give the same extension
    ex = make_function("exp", X).func
    e1 = extend_poly(ex, (10, 10, 10), total_degree=20, seed=SEED + 2)
    e2 = extend_poly(ex, (10, 10, 10), total_degree=20, seed=SEED + 3)
    gap = float(np.max(np.abs(e1(H) - e2(H))))
    parts["c"] = gap <= 1e-6, f"seed gap {gap:.1e}"
    # (d) g/p with p = z1 + z2 - 0.5
    tr = make_function("rational:c=0.5", X)
    er = extend_rational(tr.func, tr.denominator, (1, 1, 1), seed=SEED)
    g_err = float(np.abs(er.numerator.raw_coefficients() - tr.numerator).max())
    pts = er.mhat.points
    on_set = len(pts) > 0 and bool(np.all(np.abs(tr.denominator.evaluate_full(pts)) <= 1e-10))
    blow = blowup_check(er, offset=1e-8, threshold=1e6)
    parts["d"] = (g_err <= 1e-6 and on_set and bool(np.all(hull_mask(X, pts))) and er.mhat.consistent
                  and blow["passed"]), f"g err {g_err:.1e}, {len(pts)} singular points, min |ext| {blow['min_abs']:.1e}"
    return all(ok for ok, _ in parts.values()), "; ".join(f"({k}) {d}" for k, (_, d) in parts.items())


def criterion_7():
    X = CrossSpec((P,) * 3, 2, "X")
    acc = {}
    for name in ("poly", "rational:c=0.5"):
        rep = check_sep_holo(make_function(name, X).func, seed=SEED)
        acc[name] = (rep.passed, max(a["scaled_residual"] for a in rep.per_alpha.values()))
    rep = check_sep_holo(make_function("conj", X).func, seed=SEED)
    conj = max(a["max_residual"] for a in rep.per_alpha.values())
    ok = all(p and r <= 1e-6 for p, r in acc.values()) and not rep.passed and conj >= 0.1
    detail = ", ".join(f"{n} {r:.1e}" for n, (_, r) in acc.items()) + f", conj {conj:.2f}"
    return ok, detail


CRITERIA = [
    (1, "worked example: in cross, hull value 4/3, outside composite", 1.0, criterion_1),
    (2, "grid solver vs closed forms at 513^2", 30.0, criterion_2),
    (3, "combinatorial identities", 10.0, criterion_3),
    (4, "hull identities", 30.0, criterion_4),
    (5, "envelope formula battery", 10.0, criterion_5),
    (6, "extension engine", 60.0, criterion_6),
    (7, "separate-holomorphy verifier", 10.0, criterion_7),
]


def run_criterion(num, name, limit, func) -> tuple[bool, str]:
    t0 = time.perf_counter()
    try:
        ok, detail = func()
    except Exception as exc:  # a crash is a failure with its reason on the line
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    dt = time.perf_counter() - t0
    in_time = dt < limit
    passed = bool(ok) and in_time
    timing = f"{dt:.2f}s < {limit:g}s" if in_time else f"{dt:.2f}s EXCEEDS {limit:g}s"
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {num}: {name} ({timing}) {detail}"
    return passed, line


@pytest.mark.parametrize("num,name,limit,func", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, name, limit, func):
    from conftest import ACCEPTANCE_LINES

    passed, line = run_criterion(num, name, limit, func)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert passed, line


if __name__ == "__main__":
    results = [run_criterion(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(p for p, _ in results) else 1)
