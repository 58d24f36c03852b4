"""Invariant batteries shared by the CLI verify suite and the acceptance tests.

Each battery returns a list of :class:`Outcome`; nothing here raises on a
failed property, so a report can show every result at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cross import (CrossSpec, a_mask, cross_mask, decompose_check, decompose_mask, gen_family, in_center, in_cross, merge,
                    miss_count_member, nfold_cross_contains, path_samples, path_to_center, project,
                    sample_ambient, sample_cross)
from .extend import check_sep_holo, extend_poly, make_function
from .extremal import closed_form_kind, h_closed_form, h_diameter_exact, h_eval, h_grid_solve
from .geometry import UNIT_DISC, BaseSet, make_pair, unit_interval_pair
from .hull import (CompositeHull2, composite_formula, composite_value_batch, factor_values, hull_mask,
                   hull_value, in_hull, lemma_formula, sample_hull, submean_defect, SUBMEAN_RADIUS)
from .singular import delta_sets

GRID_TOL = 5e-3
EXACT_TOL = 1e-12


@dataclass
class Outcome:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "detail": _plain(self.detail)}


def _plain(obj):
    """JSON-safe copy (numpy scalars, Fractions, complex)."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    return obj


def summarize(outcomes) -> bool:
    return all(o.passed for o in outcomes)


# ---- worked example ---------------------------------------------------------------------

EXAMPLE_W = 1j / math.sqrt(3)


def example_spec() -> CrossSpec:
    P = unit_interval_pair()
    return CrossSpec((P, P, P), 2, "X")


def _exact_h(w: complex, t_squared: Fraction | None):
    """Exact h of ((-1,1), unit disc) at a purely imaginary ``w`` when available."""
    if w == 0:
        return Fraction(0)
    if t_squared is None:
        return None
    try:
        return h_diameter_exact(t_squared)
    except LookupError:
        return None


def worked_example(w: complex | None = None, strategy: str = "closed", margin: float = 1e-6) -> tuple[list, dict]:
    """Three interval factors, k = 2, z = (0, w, w).

    Asserts z in the cross, z in the hull and z outside the composite hull
    split at the last factor (first base: the center).  With the default
    ``w = i/sqrt(3)`` the values are also checked against 4/3 exactly.
    """
    default = w is None
    w = EXAMPLE_W if default else complex(w)
    t2 = Fraction(1, 3) if default else (Fraction(0) if w == 0 else None)
    spec = example_spec()
    z = np.array([0, w, w], dtype=complex)

    hv = [0.0] + [float(h_eval(spec.pairs[j], w, strategy)) for j in (1, 2)]
    he = _exact_h(w, t2)
    exact = [Fraction(0), he, he] if he is not None else None
    k = spec.k
    zs = CompositeHull2(spec, "Zs", factor=2)
    zv = CompositeHull2(spec, "Z", factor=2)

    cross_rep = in_cross(spec, z)
    hull_f = float(sum(hv))
    zs_f = float(composite_formula(hv, k, "Zs", 2))
    z_f = float(composite_formula(hv, k, "Z", 2))
    payload = {"z": z, "strategy": strategy, "witnesses": cross_rep.to_json()["witnesses"],
               "h": hv, "hull_value": hull_f, "zs_value": zs_f, "z_value": z_f,
               "lemma_value": float(lemma_formula(hv, k)) if hull_f < k else None}
    exact_ok = exact is not None and strategy != "field"
    if exact_ok:
        hull_e = sum(exact)
        zs_e = composite_formula(exact, k, "Zs", zs.factor)
        z_e = composite_formula(exact, k, "Z", zv.factor)
        payload.update(exact=True, h_exact=exact, hull_value_exact=hull_e, zs_value_exact=zs_e,
                       z_value_exact=z_e, lemma_value_exact=lemma_formula(exact, k))
        in_h, out_zs = hull_e < k, not zs_e < 1
    else:
        payload["exact"] = False
        in_h = in_hull(spec, z, strategy, margin)
        out_zs = None if (strategy == "field" and abs(zs_f - 1) <= margin) else (not zs_f < 1)

    outcomes = [
        Outcome("z in cross X_{3,2}", cross_rep.member, {"witnesses": payload["witnesses"]}),
        Outcome("z in hull (sum h < k)", in_h is True, {"hull_value": hull_f, "decision": in_h}),
        Outcome("z not in composite hull split at factor 3 (center base)", out_zs is True,
                {"zs_value": zs_f, "decision": out_zs}),
    ]
    if default and exact_ok:
        four_thirds = Fraction(4, 3)
        outcomes.append(Outcome("hull value = 4/3 (exact, float within 1e-12)",
                                hull_e == four_thirds and abs(hull_f - 4 / 3) <= EXACT_TOL,
                                {"exact": hull_e, "float": hull_f}))
        outcomes.append(Outcome("composite value = 4/3 (exact, float within 1e-12)",
                                zs_e == four_thirds and abs(zs_f - 4 / 3) <= EXACT_TOL,
                                {"exact": zs_e, "float": zs_f}))
    return outcomes, payload


# ---- extremal ----------------------------------------------------------------------------------

def catalog_pairs() -> list:
    """One pair per closed-form catalog entry."""
    return [unit_interval_pair(), make_pair(BaseSet.subdisc(0, 0.25), UNIT_DISC)]


def solver_vs_closed_form(pair, grid: int = 513, tol: float = 1e-10, backend=None) -> Outcome:
    field_ = h_grid_solve(pair, grid, grid, tol, backend=backend)
    Z = field_.nodes()
    inside = field_.interior()
    exact = h_closed_form(pair, Z[inside])
    err = float(np.max(np.abs(field_.values[inside] - exact)))
    on_A = pair.A.contains(Z) & inside
    ok = (err <= GRID_TOL and np.all(field_.values[on_A] == 0.0)
          and field_.values.min() >= 0.0 and field_.values.max() <= 1.0)
    return Outcome(f"grid vs closed form [{pair.A.kind}] at {grid}^2", bool(ok),
                   {"sup_error": err, "sweeps": field_.sweeps, "residual": field_.residual, "backend": field_.backend})


def extremal_battery(spec: CrossSpec, grid: int = 513, tol: float = 1e-10) -> list:
    out = []
    seen = []
    for p in spec.pairs:
        if p in seen:
            continue
        seen.append(p)
        if closed_form_kind(p) is not None:
            out.append(solver_vs_closed_form(p, grid, tol))
        else:
            f = h_grid_solve(p, grid, grid, tol)
            Z = f.nodes()
            inside = f.interior()
            on_A = p.A.contains(Z) & inside
            out.append(Outcome(f"grid field range and base clamp [{p.A.kind}]",
                               bool(f.values.min() >= 0 and f.values.max() <= 1 and np.all(f.values[on_A] == 0)),
                               {"sweeps": f.sweeps, "residual": f.residual}))
    return out


# ---- cross ----------------------------------------------------------------------------------------

def family_counts(max_n: int = 10) -> Outcome:
    bad = []
    for N in range(1, max_n + 1):
        for k in range(1, N + 1):
            I, J = gen_family(N, k, "I"), gen_family(N, k, "J")
            if len(I) != math.comb(N, k) or len(set(I)) != len(I) or I != sorted(I):
                bad.append(("I", N, k))
            if len(J) != sum(math.comb(N, m) for m in range(1, k + 1)) or J != sorted(J):
                bad.append(("J", N, k))
    return Outcome(f"|I| = C(N,k), |J| = sum C(N,m) for N <= {max_n}", not bad, {"failures": bad})


def merge_roundtrip(N: int, rng) -> Outcome:
    bad = 0
    z = rng.normal(size=N) + 1j * rng.normal(size=N)
    for alpha in gen_family(N, N, "J") + [tuple([0] * N)]:
        if not np.array_equal(merge(alpha, project(z, alpha, 0), project(z, alpha, 1)), z):
            bad += 1
    return Outcome(f"merge/project round trip, N={N}", bad == 0, {"failures": bad})


def variant_specs(spec: CrossSpec) -> tuple[CrossSpec, CrossSpec, CrossSpec]:
    """(X, T, Y) sharing the Σ sets of ``spec`` (T keeps the weight-k ones)."""
    X = spec.with_(variant="X")
    sig_T = {a: s for a, s in spec.sigmas.items() if sum(a) == spec.k}
    T = CrossSpec(spec.pairs, spec.k, "T", sig_T)
    Y = CrossSpec(spec.pairs, spec.k, "Y", dict(spec.sigmas))
    return X, T, Y


def cross_battery(spec: CrossSpec, n: int, rng) -> list:
    X, T, Y = variant_specs(spec)
    out = [family_counts(), merge_roundtrip(spec.N, rng)]
    Z = sample_ambient(spec, n, rng, p_base=0.6, p_sigma=0.3 if spec.sigmas else 0.0)
    mx, mt, my = cross_mask(X, Z), cross_mask(T, Z), cross_mask(Y, Z)
    out.append(Outcome("T <= Y <= X", not np.any(mt & ~my) and not np.any(my & ~mx),
                       {"samples": n, "T": int(mt.sum()), "Y": int(my.sum()), "X": int(mx.sum())}))
    T0, Y0 = CrossSpec(spec.pairs, spec.k, "T"), CrossSpec(spec.pairs, spec.k, "Y")
    out.append(Outcome("empty sigma collapse T = Y = X",
                       bool(np.array_equal(cross_mask(T0, Z), mx) and np.array_equal(cross_mask(Y0, Z), mx)),
                       {"samples": n}))
    out.append(Outcome("branch union = at most k coordinates off the base",
                       bool(np.array_equal(mx, miss_count_member(X, Z))), {"samples": n}))
    X1 = CrossSpec(spec.pairs, 1, "X")
    m1 = cross_mask(X1, Z)
    nf = np.array([nfold_cross_contains(spec.pairs, z) for z in Z[: min(n, 2000)]])
    out.append(Outcome("X_{N,1} = classical N-fold cross", bool(np.array_equal(m1[: len(nf)], nf)),
                       {"samples": int(len(nf))}))
    mono = all(not np.any(cross_mask(CrossSpec(spec.pairs, k, "X"), Z)
                          & ~cross_mask(CrossSpec(spec.pairs, k + 1, "X"), Z)) for k in range(1, spec.N))
    out.append(Outcome("X_{N,k} <= X_{N,k+1}", mono, {"samples": n}))
    if spec.N > 2:
        out.append(decomposition_identity(spec.pairs, Z))
    out.append(center_identity(spec, min(n, 1000), rng))
    out.append(path_battery(X, min(n, 200), rng))
    return out


def decomposition_identity(pairs, Z) -> Outcome:
    """Batch check for every admissible order, with a per-point spot check of the batch form."""
    N = len(pairs)
    bad = 0
    for k in range(2, N):
        Xk = CrossSpec(pairs, k, "X")
        lhs, rhs = decompose_mask(Xk, Z)
        bad += int(np.sum(lhs != rhs))
        for z, a, b in zip(Z[:50], lhs, rhs):
            if decompose_check(Xk, z) != (bool(a), bool(b)):
                bad += 1
    return Outcome(f"decomposition identity X_{{N,k}} = X(X_{{N-1,k-1}}, A_N; X_{{N-1,k}}, D_N), N={N}", bad == 0,
                   {"samples": int(len(Z)), "disagreements": bad})


def center_identity(spec: CrossSpec, n: int, rng) -> Outcome:
    """c(T) = c(X) minus Δ (weight-k family), c(Y) = c(X) minus Δ~ (family J)."""
    X, T, Y = variant_specs(spec)
    d_I, _ = delta_sets(T)
    _, d_J = delta_sets(Y)
    A = np.empty((n, spec.N), dtype=complex)
    for j, p in enumerate(spec.pairs):
        A[:, j] = p.A.sample(rng, n)
    # plant Δ rows (free entries stay random) so both sides of the identity are exercised
    rows = list(d_I.rows) + list(d_J.rows)
    for i in range(0, n, 3):
        if rows:
            row = rows[(i // 3) % len(rows)]
            for j, v in enumerate(row):
                if v is not None:
                    A[i, j] = v
    bad = 0
    for a in A:
        cx = in_center(X, a)
        if in_center(T, a) != (cx and not d_I.contains(a)) or in_center(Y, a) != (cx and not d_J.contains(a)):
            bad += 1
    return Outcome("center identities with the Δ sets", bad == 0,
                   {"samples": n, "delta_I": d_I.to_json(), "delta_J": d_J.to_json(), "failures": bad})


def path_battery(X: CrossSpec, n: int, rng) -> Outcome:
    Z = sample_cross(X, n, rng)
    bad = 0
    for z in Z:
        pts = path_samples(path_to_center(X, z), 64)
        if not np.all(cross_mask(X, pts)) or not np.all(a_mask(X, pts[-1])):
            bad += 1
    return Outcome("paths to the center stay in the cross", bad == 0, {"paths": n, "failures": bad})


# ---- hull ---------------------------------------------------------------------------------------

def hull_battery(spec: CrossSpec, n: int, seed: int, strategy: str = "auto", agreement_specs=None) -> list:
    rng = np.random.default_rng(seed)
    X = spec.with_(variant="X")
    out = []
    C = sample_cross(X, n, rng)
    inside = hull_mask(X, C, strategy)
    out.append(Outcome("cross <= hull", bool(inside.all()), {"samples": n, "outside": int((~inside).sum())}))
    bad = 0
    for k in range(1, spec.N):
        H = sample_hull(X.with_(k=k), n, seed + k, strategy)
        bad += int((~hull_mask(X, H, strategy, k=k + 1)).sum())
    out.append(Outcome("hull order k <= hull order k+1", bad == 0, {"samples_per_k": n, "failures": bad}))
    for S in (agreement_specs or [X]):
        out.append(composite_agreement(S, n, seed, strategy))
    return out


def composite_agreement(spec: CrossSpec, n: int, seed: int, strategy: str = "auto", band: float = 1e-9) -> Outcome:
    """Composite hull (first base: order-(k-1) cross) equals the hull, for every admissible k."""
    rng = np.random.default_rng(seed)
    detail = {"N": spec.N}
    bad = skipped = total = 0
    for k in range(2, spec.N):
        S = spec.with_(k=k)
        H = sample_hull(S, n, seed + 100 + k, strategy)
        Z = np.concatenate([H, sample_ambient(S, n // 4, rng)])
        h = hull_value(S, Z, strategy)
        c = CompositeHull2(S, "Z")
        val, first_ok = composite_value_batch(c, Z, strategy)
        near = (np.abs(h - k) < band) | (np.abs(val - 1) < band)
        comp = first_ok & (val < 1)
        bad += int(np.sum((comp != (h < k)) & ~near))
        skipped += int(near.sum())
        total += len(Z)
    detail.update(samples=total, disagreements=bad, skipped_in_band=skipped)
    return Outcome(f"composite hull = hull (N={spec.N})", bad == 0 and total > 0, detail)


# ---- envelope formula -------------------------------------------------------------------------------

def _inner(spec: CrossSpec, Z: np.ndarray, gap: float) -> np.ndarray:
    keep = np.ones(len(Z), dtype=bool)
    for j, p in enumerate(spec.pairs):
        keep &= np.abs(Z[:, j] - p.D.center) < p.D.radius - gap
    return keep


def lemma_battery(spec: CrossSpec, n: int, seed: int, slack: float = 1e-6) -> list:
    X = spec.with_(variant="X")
    if X.k < 2:
        return [Outcome("envelope formula battery", True, {"skipped": "needs k >= 2"})]
    strategy = "closed" if all(closed_form_kind(p) is not None for p in X.pairs) else "auto"
    rng = np.random.default_rng(seed)
    k = X.k
    lower = sample_hull(X.with_(k=k - 1), n, seed, strategy)
    v0 = lemma_formula(factor_values(X, lower, strategy), k)
    out = [Outcome("formula vanishes on the order-(k-1) hull", bool(np.all(v0 == 0)),
                   {"samples": n, "max": float(v0.max())})]
    H = sample_hull(X, n, seed + 1, strategy)
    v1 = lemma_formula(factor_values(X, H, strategy), k)
    out.append(Outcome("formula < 1 on the order-k hull", bool(np.all(v1 < 1)), {"samples": n, "max": float(v1.max())}))
    if strategy != "closed":
        out.append(Outcome("sub-mean inequality", True, {"skipped": "needs closed-form factors"}))
        return out
    radius = SUBMEAN_RADIUS * min(p.D.radius for p in X.pairs)

    def func(Z):
        return lemma_formula(factor_values(X, Z, "closed"), k)

    # the ring around z moves each coordinate by at most radius; keep it inside D
    centers = H[_inner(X, H, 2 * radius)]
    extra_seed = seed + 2
    while len(centers) < n and extra_seed < seed + 12:
        more = sample_hull(X, n, extra_seed, strategy)
        centers = np.concatenate([centers, more[_inner(X, more, 2 * radius)]])
        extra_seed += 1
    centers = centers[:n]
    worst = math.inf
    for z in centers:
        v = rng.normal(size=X.N) + 1j * rng.normal(size=X.N)
        worst = min(worst, submean_defect(func, z, v, radius))
    out.append(Outcome("sub-mean inequality on complex-line circles", worst >= -slack and len(centers) == n,
                       {"circles": len(centers), "radius": radius, "worst_defect": worst, "slack": slack}))
    return out


# ---- extension ---------------------------------------------------------------------------------------

def extend_battery(spec: CrossSpec, seed: int) -> list:
    X = spec.with_(variant="X")
    out = []
    tf = make_function("poly222", X)
    ext = extend_poly(tf.func, (2,) * X.N, seed=seed)
    err = float(np.abs(ext.raw_coefficients() - tf.coeffs).max())
    out.append(Outcome("degree-2 polynomial recovered", err <= 1e-8, {"coef_error": err, "residual": ext.residual}))
    if X.N >= 3:
        rep = check_sep_holo(make_function("poly", X).func, seed=seed)
        out.append(Outcome("separate holomorphy accepted for z1 + z2 z3", rep.passed,
                           {"worst": max(a["scaled_residual"] for a in rep.per_alpha.values())}))
    if X.N >= 2:
        rep = check_sep_holo(make_function("conj", X).func, seed=seed)
        worst = max(a["max_residual"] for a in rep.per_alpha.values())
        out.append(Outcome("separate holomorphy rejects conj(z2)", (not rep.passed) and worst >= 0.1, {"worst": worst}))
    return out
