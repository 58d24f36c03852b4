"""Separate-holomorphy checks and desk-scale extension from cross data to the hull.

Extensions are multi-power polynomials fitted by least squares to samples of
``f`` on the cross.  Coordinates are normalized per factor,
``w_j = (z_j - c_j) / R_j``, so every monomial is bounded by 1 on the
polydisc.  Samples are stratified over the cross branches: D-coordinates lie
on the circle ``|w| = shrink``, A-coordinates are drawn from the base pieces
(arcsine law on segments) pulled toward the piece anchor by ``shrink``.

A rational test function ``f = g / p`` with a given denominator is handled by
fitting ``g = p f`` and dividing back; the singular set of the extension is
``{p = 0}`` intersected with the hull.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg as sla

from .cross import CrossSpec, bits, cross_mask, ones_of, zeros_of
from .errors import (DenominatorVanishesIdentically, IllConditioned, InsufficientSamples,
                     UndefinedValue)
from .geometry import Segment, SubDisc
from .hull import hull_mask
from .singular import Polynomial, SingularSet, ZERO_TOL, fiber, linear_form

COND_LIMIT = 1e12
QR_SWITCH = 1e7  # normal equations lose ~cond^2; beyond this re-solve by QR
QR_MAX_COLS = 1200
SEP_HOLO_TOL = 1e-6
CHUNK = 2048


# ---- sampled functions ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Black-box ``evaluator((n, N) complex) -> (n,) complex``; NaN marks undefined points."""

    evaluator: Callable
    spec: CrossSpec
    exclusion: SingularSet | None = None
    name: str = ""

    def __post_init__(self):
        if self.exclusion is None:
            object.__setattr__(self, "exclusion", SingularSet.empty(range(self.spec.N)))
        if self.exclusion.coords != tuple(range(self.spec.N)):
            raise ValueError("exclusion must be a descriptor over all N coordinates")

    def __call__(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        return np.asarray(self.evaluator(Z), dtype=complex).reshape(Z.shape[0])

    def checked(self, Z) -> np.ndarray:
        """Evaluate; NaN outside the exclusion raises UndefinedValue."""
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        v = self(Z)
        bad = ~np.isfinite(v)
        if bad.any():
            inside = np.atleast_1d(self.exclusion.contains(Z[bad]))
            if not np.all(inside):
                z = Z[bad][~inside][0]
                raise UndefinedValue(f"{self.name or 'function'} undefined at {z} outside its exclusion set")
        return v


# ---- sampling --------------------------------------------------------------------------

def _sample_base(A, rng, n: int, shrink: float) -> np.ndarray:
    which = rng.integers(len(A.pieces), size=n)
    out = np.empty(n, dtype=complex)
    for i, piece in enumerate(A.pieces):
        sel = which == i
        m = int(sel.sum())
        if not m:
            continue
        if isinstance(piece, Segment):
            z = piece.sample(rng, m, "arcsine")
        elif isinstance(piece, SubDisc):
            z = piece.sample(rng, m)
        else:  # pragma: no cover - rejected at make_pair
            raise TypeError(piece)
        a = piece.anchor()
        out[sel] = a + shrink * (z - a)
    return out


def fit_samples(spec: CrossSpec, n: int, rng: np.random.Generator, shrink: float = 0.8) -> np.ndarray:
    """``n`` cross points, branches taken in turn over the index family of the cross."""
    fam = spec.family
    Z = np.empty((n, spec.N), dtype=complex)
    branch = np.arange(n) % len(fam)
    for i, alpha in enumerate(fam):
        idx = np.nonzero(branch == i)[0]
        todo = idx
        for _ in range(100):
            m = todo.size
            for j, p in enumerate(spec.pairs):
                if alpha[j]:
                    t = rng.uniform(0.0, 2 * np.pi, size=m)
                    Z[todo, j] = p.D.center + shrink * p.D.radius * np.exp(1j * t)
                else:
                    Z[todo, j] = _sample_base(p.A, rng, m, shrink)
            if alpha not in spec.sigmas:
                break
            hit = np.atleast_1d(spec.sigma(alpha).contains(Z[np.ix_(todo, list(zeros_of(alpha)))]))
            todo = todo[hit]
            if not todo.size:
                break
    return Z


# ---- monomial bases -------------------------------------------------------------------

def exponents(degrees, total_degree: int | None = None) -> np.ndarray:
    """Exponent tuples bounded per variable (and in total, if given), lexicographic."""
    ms = [m for m in itertools.product(*(range(d + 1) for d in degrees))
          if total_degree is None or sum(m) <= total_degree]
    return np.array(ms, dtype=np.int64).reshape(-1, len(degrees))


def _normalize(Z, centers, radii) -> np.ndarray:
    return (np.asarray(Z, dtype=complex) - centers) / radii


def design_matrix(W: np.ndarray, ms: np.ndarray) -> np.ndarray:
    """Rows ``prod_j W[:, j] ** ms[:, j]`` for each exponent tuple."""
    dmax = int(ms.max()) if ms.size else 0
    P = W[:, :, None] ** np.arange(dmax + 1)
    V = P[:, 0, ms[:, 0]].copy()
    for j in range(1, W.shape[1]):
        V *= P[:, j, ms[:, j]]
    return V


def _taylor_matrix(deg: int, c: complex, R: float, to_raw: bool) -> np.ndarray:
    T = np.zeros((deg + 1, deg + 1), dtype=complex)
    for m in range(deg + 1):
        for l in range(m + 1):
            b = math.comb(m, l)
            if to_raw:  # ((z-c)/R)^m in powers of z
                T[m, l] = b * (-c) ** (m - l) / R ** m
            else:  # z^m in powers of (z-c)/R
                T[m, l] = b * c ** (m - l) * R ** l
    return T


def _change_basis(coeffs: np.ndarray, centers, radii, to_raw: bool) -> np.ndarray:
    out = np.asarray(coeffs, dtype=complex)
    for j in range(out.ndim):
        T = _taylor_matrix(out.shape[j] - 1, centers[j], radii[j], to_raw)
        out = np.moveaxis(np.tensordot(np.moveaxis(out, j, -1), T, axes=([-1], [0])), -1, j)
    return out


# ---- least squares -------------------------------------------------------------------------

@dataclass
class _Solve:
    coef: np.ndarray
    cond: float
    method: str


def _lstsq(V: np.ndarray, y: np.ndarray) -> _Solve:
    """Column-scaled least squares with a condition guard. Overwrites ``V``."""
    s = np.linalg.norm(V, axis=0)
    s[s == 0] = 1.0
    V /= s
    m = V.shape[1]
    if m > QR_MAX_COLS:
        G = sla.blas.zherk(1.0, V, trans=2, lower=0)
        G = np.triu(G) + np.triu(G, 1).conj().T
        try:
            cf = sla.cho_factor(G, lower=False, check_finite=False)
        except np.linalg.LinAlgError:
            raise IllConditioned("normal matrix is numerically singular") from None
        rc = sla.lapack.zpocon(cf[0], np.linalg.norm(G, 1))[0]
        cond = math.sqrt(1.0 / rc) if rc > 0 else math.inf
        if cond > COND_LIMIT:
            raise IllConditioned(f"condition estimate {cond:.2e} exceeds {COND_LIMIT:.0e}")
        if cond <= QR_SWITCH:
            c = sla.cho_solve(cf, V.conj().T @ y)
            for _ in range(3):
                c = c + sla.cho_solve(cf, V.conj().T @ (y - V @ c))
            return _Solve(c / s, cond, "normal")
        del G, cf
    Q, R = np.linalg.qr(V)
    rc = sla.lapack.ztrcon(R, norm="1")[0]
    cond = 1.0 / rc if rc > 0 else math.inf
    if cond > COND_LIMIT:
        raise IllConditioned(f"condition estimate {cond:.2e} exceeds {COND_LIMIT:.0e}")
    c = sla.solve_triangular(R, Q.conj().T @ y)
    return _Solve(c / s, cond, "qr")


@dataclass(eq=False)
class PolyExtension:
    """Multi-power polynomial in normalized coordinates, fitted on cross samples."""

    coeffs: np.ndarray  # shape degrees + 1, zero outside the total-degree cap
    degrees: tuple
    total_degree: int | None
    centers: np.ndarray
    radii: np.ndarray
    residual: float  # max |fit - data| on the samples
    rel_residual: float
    cond: float
    n_samples: int
    method: str = ""

    @property
    def exponents(self) -> np.ndarray:
        return exponents(self.degrees, self.total_degree)

    def __call__(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        ms = self.exponents
        c = self.coeffs[tuple(ms.T)]
        out = np.empty(Z.shape[0], dtype=complex)
        for lo in range(0, Z.shape[0], CHUNK):
            W = _normalize(Z[lo:lo + CHUNK], self.centers, self.radii)
            out[lo:lo + CHUNK] = design_matrix(W, ms) @ c
        return out

    def raw_coefficients(self) -> np.ndarray:
        """Coefficients in powers of the original coordinates."""
        return _change_basis(self.coeffs, self.centers, self.radii, to_raw=True)

    def to_json(self) -> dict:
        from .singular import _tensor_to_json
        return {"kind": "poly-extension", "basis": "normalized",
                "degrees": list(self.degrees), "total_degree": self.total_degree,
                "centers": [[c.real, c.imag] for c in self.centers],
                "radii": [float(r) for r in self.radii],
                "residual": self.residual, "rel_residual": self.rel_residual,
                "cond": self.cond, "n_samples": self.n_samples, "method": self.method,
                "coeffs": _tensor_to_json(self.coeffs)}


def _fit(spec: CrossSpec, Z: np.ndarray, y: np.ndarray, degrees, total_degree, weighting: str) -> PolyExtension:
    centers = np.array([p.D.center for p in spec.pairs])
    radii = np.array([p.D.radius for p in spec.pairs])
    ms = exponents(degrees, total_degree)
    W = _normalize(Z, centers, radii)
    V = design_matrix(W, ms)
    ymax = float(np.abs(y).max()) if y.size else 0.0
    if weighting == "relative" and ymax > 0:
        w = 1.0 / np.maximum(np.abs(y), 1e-8 * ymax)
    elif weighting in ("relative", "none"):
        w = np.ones(y.size)
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    V *= w[:, None]
    sol = _lstsq(V, y * w)
    del V
    coeffs = np.zeros(tuple(d + 1 for d in degrees), dtype=complex)
    coeffs[tuple(ms.T)] = sol.coef
    ext = PolyExtension(coeffs, tuple(degrees), total_degree, centers, radii, 0.0, 0.0,
                        sol.cond, int(Z.shape[0]), sol.method)
    r = np.abs(ext(Z) - y)
    ext.residual = float(r.max()) if r.size else 0.0
    ext.rel_residual = ext.residual / max(ymax, 1e-300) if ymax > 0 else ext.residual
    return ext


def _budget(degrees, total_degree, budget) -> int:
    ncoef = len(exponents(degrees, total_degree))
    n = 3 * ncoef if budget is None else int(budget)
    if n < 3 * ncoef:
        raise InsufficientSamples(f"{n} samples for {ncoef} coefficients; need at least {3 * ncoef}")
    return n


def extend_poly(f: SampledFunction, degrees, budget: int | None = None, seed: int = 0,
                total_degree: int | None = None, shrink: float = 0.8,
                weighting: str = "relative") -> PolyExtension:
    """Least-squares multi-power fit of ``f`` on stratified cross samples."""
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) != f.spec.N or min(degrees) < 0:
        raise ValueError(f"need {f.spec.N} non-negative degree bounds")
    if f.exclusion.kind != "empty":
        raise ValueError("extend_poly takes functions without singularities; use extend_rational")
    n = _budget(degrees, total_degree, budget)
    Z = fit_samples(f.spec, n, np.random.default_rng(seed), shrink)
    y = f.checked(Z)
    return _fit(f.spec, Z, y, degrees, total_degree, weighting)


# ---- rational extensions ---------------------------------------------------------------------

@dataclass(eq=False)
class MHat:
    """Zero set of the denominator inside the hull."""

    empty_certified: bool
    points: np.ndarray  # sampled points of the set (n, N)
    on_cross: int  # how many sampled points lie on the cross
    on_cross_in_exclusion: int

    @property
    def consistent(self) -> bool:
        """Sampled check that the part on the cross lies in the exclusion set."""
        return self.on_cross == self.on_cross_in_exclusion

    def to_json(self) -> dict:
        return {"empty_certified": self.empty_certified, "n_points": int(len(self.points)),
                "on_cross": self.on_cross, "on_cross_in_exclusion": self.on_cross_in_exclusion,
                "consistent": self.consistent}


@dataclass(eq=False)
class RationalExtension:
    numerator: PolyExtension
    denominator: Polynomial
    mhat: MHat
    n_dropped: int = 0

    def __call__(self, Z) -> np.ndarray:
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        return self.numerator(Z) / self.denominator.evaluate_full(Z)

    def to_json(self) -> dict:
        return {"kind": "rational-extension", "numerator": self.numerator.to_json(),
                "denominator": self.denominator.to_json(), "mhat": self.mhat.to_json(),
                "n_dropped": self.n_dropped}


def _normalized_poly(p: Polynomial, spec: CrossSpec) -> np.ndarray:
    centers = [spec.pairs[v].D.center for v in p.vars]
    radii = [spec.pairs[v].D.radius for v in p.vars]
    return _change_basis(p.coeffs, centers, radii, to_raw=False)


def certify_no_zeros(p: Polynomial, spec: CrossSpec) -> bool:
    """True if ``|p(center)| > sum of the other |coefficients|`` in normalized coordinates,
    which rules out zeros on the closed polydisc (hence in the hull)."""
    c = np.abs(_normalized_poly(p, spec)).ravel()
    return bool(c[0] > c[1:].sum())


def _solve_in(p: Polynomial, z: np.ndarray, j: int) -> np.ndarray:
    """Roots in z_j of p with the other coordinates of ``z`` fixed; None if p vanishes on the line."""
    sub = p.substitute({v: z[v] for v in p.vars if v != j})
    if sub.is_zero():
        return None
    c = sub.coeffs.ravel() if sub.vars else np.array([sub.coeffs.item()])
    nz = np.nonzero(np.abs(c) > ZERO_TOL * sub.scale)[0]
    if nz.size == 0 or nz.max() == 0:
        return np.zeros(0, dtype=complex)
    return np.roots(c[: nz.max() + 1][::-1])


def sample_mhat(p: Polynomial, spec: CrossSpec, n: int, rng: np.random.Generator,
                max_tries: int | None = None) -> np.ndarray:
    """Points of ``{p = 0}`` in the hull, by solving for one variable on random lines."""
    solve_vars = [v for i, v in enumerate(p.vars) if p.coeffs.shape[i] > 1]
    if not solve_vars:
        return np.zeros((0, spec.N), dtype=complex)
    fam = spec.family
    found = []
    tries = max_tries if max_tries is not None else 50 * n
    for t in range(tries):
        if len(found) >= n:
            break
        alpha = fam[t % len(fam)]
        z = np.empty(spec.N, dtype=complex)
        for j, pr in enumerate(spec.pairs):
            z[j] = pr.A.sample(rng, 1)[0] if alpha[j] == 0 and rng.uniform() < 0.5 else pr.D.sample(rng, 1)[0]
        j = solve_vars[t % len(solve_vars)]
        roots = _solve_in(p, z, j)
        if roots is None or roots.size == 0:
            continue
        for r in roots:
            w = z.copy()
            w[j] = r
            if spec.pairs[j].D.contains(r) and hull_mask(spec, w[None, :])[0]:
                found.append(w)
    return np.array(found[:n], dtype=complex).reshape(-1, spec.N)


def extend_rational(f: SampledFunction, p: Polynomial, degrees, budget: int | None = None, seed: int = 0,
                    total_degree: int | None = None, shrink: float = 0.8, mhat_samples: int = 64,
                    weighting: str = "relative") -> RationalExtension:
    """Fit ``g = p f`` on the cross and return ``g / p`` with its singular set in the hull."""
    if p.is_zero():
        raise DenominatorVanishesIdentically("the denominator is the zero polynomial")
    if not set(p.vars) <= set(range(f.spec.N)):
        raise ValueError("denominator uses variables outside the cross")
    degrees = tuple(int(d) for d in degrees)
    n = _budget(degrees, total_degree, budget)
    rng = np.random.default_rng(seed)
    Z = fit_samples(f.spec, n, rng, shrink)
    pv = p.evaluate_full(Z)
    # points on or next to the zero set carry no usable information about g
    near = np.abs(pv) <= 1e-8 * np.maximum(p.magnitude(Z[:, list(p.vars)]), 1e-300)
    fv = f(Z)
    undefined = ~np.isfinite(fv)
    if undefined.any():
        f.checked(Z[undefined & ~near])
    keep = ~(near | undefined)
    y = pv[keep] * fv[keep]
    num = _fit(f.spec, Z[keep], y, degrees, total_degree, weighting)

    certified = certify_no_zeros(p, f.spec)
    if certified:
        pts = np.zeros((0, f.spec.N), dtype=complex)
    else:
        pts = sample_mhat(p, f.spec, mhat_samples, np.random.default_rng(seed + 1))
    on_cross = cross_mask(f.spec, pts) if len(pts) else np.zeros(0, dtype=bool)
    in_excl = np.atleast_1d(f.exclusion.contains(pts[on_cross])) if on_cross.any() else np.zeros(0, dtype=bool)
    mhat = MHat(certified, pts, int(on_cross.sum()), int(np.sum(in_excl)))
    return RationalExtension(num, p, mhat, int((~keep).sum()))


def blowup_check(ext: RationalExtension, offset: float = 1e-8, threshold: float = 1e6) -> dict:
    """|ext| at distance ``offset`` from sampled points of the singular set."""
    pts = ext.mhat.points
    if not len(pts):
        return {"count": 0, "min_abs": math.inf, "passed": True}
    p = ext.denominator
    j = next(v for i, v in enumerate(p.vars) if p.coeffs.shape[i] > 1)
    Zo = pts.copy()
    Zo[:, j] += offset
    vals = np.abs(ext(Zo))
    return {"count": int(len(pts)), "min_abs": float(vals.min()), "passed": bool(vals.min() >= threshold)}


# ---- comparison -----------------------------------------------------------------------------------

def compare_on_hull(ext, oracle, samples) -> dict:
    """Max/mean absolute and relative discrepancy of ``ext`` against ``oracle`` on ``samples``."""
    Z = np.asarray(samples, dtype=complex)
    if Z.size == 0:
        return {"count": 0, "max_abs": 0.0, "mean_abs": 0.0, "max_rel": 0.0, "mean_rel": 0.0}
    Z = np.atleast_2d(Z)
    a = np.asarray(ext(Z))
    b = np.asarray(oracle(Z))
    err = np.abs(a - b)
    rel = err / np.maximum(np.abs(b), 1e-300)
    return {"count": int(Z.shape[0]), "max_abs": float(err.max()), "mean_abs": float(err.mean()),
            "max_rel": float(rel.max()), "mean_rel": float(rel.mean())}


# ---- separate holomorphy ------------------------------------------------------------------------------

@dataclass
class SepHoloReport:
    passed: bool
    per_alpha: dict
    resolution: int
    continuity: dict | None = None
    heuristic: bool = True  # finite sampling, not a proof

    def to_json(self) -> dict:
        return {"passed": self.passed, "resolution": self.resolution, "per_alpha": self.per_alpha,
                "continuity": self.continuity, "heuristic": self.heuristic}


def _line_exclusion(M: SingularSet, z: np.ndarray, j: int):
    """Values of z_j for which z lies in M with the other coordinates fixed; None = whole line."""
    if M.kind == "empty":
        return np.zeros(0, dtype=complex)
    if M.kind == "full":
        return None
    if M.kind == "points":
        others = [i for i in range(len(z)) if i != j]
        hit = np.all(M.points[:, others] == z[others], axis=1)
        return M.points[hit, j]
    if j not in M.poly.vars:
        return None if M.contains(z) else np.zeros(0, dtype=complex)
    return _solve_in(M.poly, z, j)


def check_sep_holo(f: SampledFunction, resolution: int = 32, seed: int = 0, anchors: dict | None = None,
                   n_anchors: int = 4, n_circles: int = 4, continuity: bool = False,
                   tol: float = SEP_HOLO_TOL) -> SepHoloReport:
    """Discrete Morera test of every fiber map along each free coordinate.

    For a circle ``b + r e^{it}`` in coordinate j the statistic
    ``|mean_q f(b + r e^{i t_q}) e^{i t_q}| / r`` vanishes (up to aliasing of
    order ``r**resolution``) for holomorphic fibers and approximates
    ``|df/dconj(z_j)|`` otherwise.  Circles that meet or enclose the exclusion
    set (poles within 3 radii leak through aliasing) are skipped; fibers on which the exclusion is everything are reported.
    ``anchors`` optionally maps multi-indices to lists of α-zero sub-points.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    spec = f.spec
    rng = np.random.default_rng(seed)
    t = 2 * np.pi * np.arange(resolution) / resolution
    e = np.exp(1j * t)
    per_alpha, ok_all = {}, True
    for alpha in spec.family:
        zeros, ones = list(zeros_of(alpha)), list(ones_of(alpha))
        if anchors is not None and tuple(alpha) in anchors:
            A_pts = [np.atleast_1d(np.asarray(a, dtype=complex)) for a in anchors[tuple(alpha)]]
        else:
            A_pts = []
            for _ in range(20 * n_anchors):
                if len(A_pts) >= n_anchors:
                    break
                a = np.array([spec.pairs[j].A.sample(rng, 1)[0] for j in zeros], dtype=complex)
                if spec.variant != "X" and spec.sigma(alpha).contains(a):
                    continue
                A_pts.append(a)
        worst, worst_ratio, n_done, n_skip, excluded = 0.0, 0.0, 0, 0, []
        for a in A_pts:
            if f.exclusion.kind != "empty":
                fib = fiber(f.exclusion, a, alpha)
                if fib.kind == "full":
                    excluded.append([[v.real, v.imag] for v in a])
                    continue
            for _ in range(n_circles):
                z = np.empty(spec.N, dtype=complex)
                z[zeros] = a
                for j in ones:
                    D = spec.pairs[j].D
                    z[j] = D.center + 0.5 * D.radius * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                for j in ones:
                    r = 0.25 * spec.pairs[j].D.radius
                    roots = _line_exclusion(f.exclusion, z, j)
                    if roots is None or (roots.size and np.min(np.abs(roots - z[j])) < 3 * r):
                        n_skip += 1
                        continue
                    ring = np.repeat(z[None, :], resolution, axis=0)
                    ring[:, j] = z[j] + r * e
                    vals = f.checked(ring)
                    stat = abs(np.mean(vals * e)) / r
                    scale = max(1.0, float(np.abs(vals).max()))
                    worst = max(worst, stat)
                    worst_ratio = max(worst_ratio, stat / scale)
                    n_done += 1
        passed = worst_ratio <= tol
        ok_all &= passed
        per_alpha[bits(alpha)] = {"max_residual": worst, "scaled_residual": worst_ratio, "passed": passed,
                                  "circles": n_done, "skipped": n_skip, "excluded_fibers": excluded}
    cont = _continuity_probe(f, rng) if continuity else None
    return SepHoloReport(ok_all, per_alpha, resolution, cont)


def _continuity_probe(f: SampledFunction, rng, n: int = 16, step: float = 1e-4) -> dict:
    """Finite-difference modulus of continuity in the α-zero coordinates (heuristic)."""
    spec = f.spec
    out = {}
    for alpha in spec.family:
        zeros, ones = list(zeros_of(alpha)), list(ones_of(alpha))
        worst = 0.0
        for _ in range(n):
            z = np.empty(spec.N, dtype=complex)
            for j in ones:
                D = spec.pairs[j].D
                z[j] = D.center + 0.5 * D.radius * np.exp(2j * np.pi * rng.uniform())
            for j in zeros:
                z[j] = spec.pairs[j].A.sample(rng, 1)[0]
            w = z.copy()
            for j in zeros:
                piece_pt = spec.pairs[j].A.sample(rng, 1)[0]
                w[j] = z[j] + step * (piece_pt - z[j]) / max(abs(piece_pt - z[j]), 1e-300)
            v = f(np.stack([z, w]))
            if np.all(np.isfinite(v)):
                worst = max(worst, abs(v[1] - v[0]) / step)
        out[bits(alpha)] = {"lipschitz_estimate": worst}
    return out


# ---- test-function registry ------------------------------------------------------------------------

@dataclass(eq=False)
class TestFunction:
    func: SampledFunction
    coeffs: np.ndarray | None = None  # raw monomial coefficients when f is a polynomial
    denominator: Polynomial | None = None
    numerator: np.ndarray | None = None  # raw coefficients of p*f when rational
    holomorphic: bool = True

    __test__ = False  # not a pytest class


def _poly_eval(coeffs: np.ndarray):
    ms = np.argwhere(coeffs != 0)
    cs = coeffs[tuple(ms.T)]

    def ev(Z):
        return design_matrix(Z, ms) @ cs if len(ms) else np.zeros(Z.shape[0], dtype=complex)
    return ev


def poly222_coeffs(N: int) -> np.ndarray:
    """Fixed dense polynomial of degree 2 in each variable."""
    c = np.zeros((3,) * N, dtype=complex)
    for m in itertools.product(range(3), repeat=N):
        s = sum((i + 1) * e for i, e in enumerate(m))
        c[m] = complex(1 + s, (-1) ** s * (len(m) - sum(m))) / (1 + sum(m))
    return c


def make_function(name: str, spec: CrossSpec) -> TestFunction:
    """Built-in functions: poly, poly222, geom, exp, zero, conj, rational:c=<x>, rational-z3, pole:w0=<x>."""
    N = spec.N
    empty = SingularSet.empty(range(N))
    if name == "poly":
        if N < 3:
            raise ValueError("'poly' (z1 + z2 z3) needs N >= 3")
        c = np.zeros((2,) * N, dtype=complex)
        c[(1,) + (0,) * (N - 1)] = 1
        c[(0, 1, 1) + (0,) * (N - 3)] = 1
        return TestFunction(SampledFunction(_poly_eval(c), spec, empty, name), coeffs=c)
    if name == "poly222":
        c = poly222_coeffs(N)
        return TestFunction(SampledFunction(_poly_eval(c), spec, empty, name), coeffs=c)
    if name == "zero":
        return TestFunction(SampledFunction(lambda Z: np.zeros(Z.shape[0], complex), spec, empty, name),
                            coeffs=np.zeros((1,) * N, dtype=complex))
    if name == "geom":
        return TestFunction(SampledFunction(lambda Z: 1.0 / (N - Z.sum(axis=1)), spec, empty, name))
    if name == "exp":
        return TestFunction(SampledFunction(lambda Z: np.exp(Z.sum(axis=1) / 2), spec, empty, name))
    if name == "conj":
        j = 1 if N > 1 else 0
        return TestFunction(SampledFunction(lambda Z: np.conj(Z[:, j]), spec, empty, name), holomorphic=False)
    m = re.fullmatch(r"rational:c=([-+0-9.eE]+)", name)
    if m or name == "rational-z3":
        if N < 2 or (name == "rational-z3" and N < 3):
            raise ValueError(f"{name!r} needs more factors")
        cval = float(m.group(1)) if m else 0.5
        p = linear_form({0: 1.0, 1: 1.0}, -cval)
        M = SingularSet.zero_set(range(N), p)
        num = np.zeros((2,) * N, dtype=complex)
        if name == "rational-z3":
            num[(0, 0, 1) + (0,) * (N - 3)] = 1

            def ev(Z, p=p, M=M):
                return _masked(Z, M, lambda Z: Z[:, 2] / p.evaluate_full(Z))
        else:
            num[(0,) * N] = 1

            def ev(Z, p=p, M=M):
                return _masked(Z, M, lambda Z: 1.0 / p.evaluate_full(Z))
        return TestFunction(SampledFunction(ev, spec, M, name), denominator=p, numerator=num)
    m = re.fullmatch(r"pole:w0=([-+0-9.eE]+)", name)
    if m:
        w0 = float(m.group(1))
        j = 1 if N > 1 else 0
        p = linear_form({j: 1.0}, -w0)
        M = SingularSet.zero_set(range(N), p)
        num = np.zeros((1,) * N, dtype=complex)
        num[(0,) * N] = 1

        def ev(Z, p=p, M=M):
            return _masked(Z, M, lambda Z: 1.0 / p.evaluate_full(Z))
        return TestFunction(SampledFunction(ev, spec, M, name), denominator=p, numerator=num)
    raise ValueError(f"unknown test function {name!r}")


def _masked(Z, M: SingularSet, fn) -> np.ndarray:
    out = np.full(Z.shape[0], np.nan + 0j)
    ok = ~np.atleast_1d(M.contains(Z))
    if ok.any():
        with np.errstate(divide="ignore", invalid="ignore"):
            out[ok] = fn(Z[ok])
    return out


FUNCTION_NAMES = ("poly", "poly222", "zero", "geom", "exp", "conj", "rational:c=<x>", "rational-z3", "pole:w0=<x>")
