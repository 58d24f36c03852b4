"""Hulls of crosses: ``{z : sum_j h_j(z_j) < k}``, the envelope formula between
consecutive hulls, and the two-fold composite hulls built from them.

Formula helpers (``lemma_formula``, ``composite_formula``) take precomputed
factor values and work for floats, numpy arrays and ``Fraction`` alike, so
exact rational checks reuse the same code path as the float evaluation.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .cross import CrossSpec, _check_point
from .errors import BadOrder, NotInHull, OutsideAmbient, SamplingExhausted, UnsupportedComposite
from .extremal import STRATEGIES, closed_form_kind, h_eval

INDETERMINATE = None
DEFAULT_MARGIN = 1e-6


def _strategies(spec: CrossSpec, strategy) -> list:
    if isinstance(strategy, str):
        strategy = [strategy] * spec.N
    strategy = list(strategy)
    if len(strategy) != spec.N or any(s not in STRATEGIES for s in strategy):
        raise ValueError(f"strategy must be one of {STRATEGIES} or a list of those per factor")
    return strategy


def _is_exact(spec: CrossSpec, strategy) -> bool:
    """True when every factor is evaluated in closed form."""
    for p, s in zip(spec.pairs, _strategies(spec, strategy)):
        if s == "field" or (s == "auto" and closed_form_kind(p) is None):
            return False
    return True


def factor_values(spec: CrossSpec, Z, strategy="auto") -> np.ndarray:
    """h_j(z_j) for points of shape (..., N)."""
    Z = _check_point(spec, Z)
    out = np.empty(Z.shape)
    for j, (p, s) in enumerate(zip(spec.pairs, _strategies(spec, strategy))):
        out[..., j] = h_eval(p, Z[..., j], s)
    return out


def hull_value(spec: CrossSpec, z, strategy="auto"):
    """Sum of the factor extremal functions; a point is in the hull iff this is < k."""
    v = factor_values(spec, z, strategy).sum(axis=-1)
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class HullQuery:
    spec: CrossSpec
    strategy: object = "auto"
    margin: float = DEFAULT_MARGIN

    def __post_init__(self):
        if not 0 <= self.margin < 1:
            raise ValueError("margin must lie in [0, 1)")
        _strategies(self.spec, self.strategy)

    def decide(self, z):
        return in_hull(self.spec, z, self.strategy, self.margin)


def in_hull(spec: CrossSpec, z, strategy="auto", margin: float = DEFAULT_MARGIN, k: int | None = None):
    """True/False, or None when a field-based value sits within ``margin`` of ``k``.

    Closed-form evaluation decides the strict inequality directly.  Batches
    return an object array of True/False/None.
    """
    k = spec.k if k is None else k
    v = np.asarray(hull_value(spec, z, strategy))
    if _is_exact(spec, strategy):
        out = v < k
        return bool(out) if out.ndim == 0 else out
    res = np.where(v < k, True, False).astype(object)
    res[np.abs(v - k) <= margin] = INDETERMINATE
    return res.item() if res.ndim == 0 else res


def hull_mask(spec: CrossSpec, Z, strategy="auto", k: int | None = None) -> np.ndarray:
    """Plain boolean ``value < k`` for batches (no indeterminate band)."""
    k = spec.k if k is None else k
    return np.atleast_1d(hull_value(spec, np.atleast_2d(Z), strategy)) < k


# ---- envelope between consecutive hulls ---------------------------------------------

def lemma_formula(values, k):
    """``max(0, sum(values) - k + 1)`` over the last axis; Fraction-safe for sequences."""
    if isinstance(values, np.ndarray):
        return np.maximum(0.0, values.sum(axis=-1) - k + 1)
    s = sum(values, Fraction(0) if all(isinstance(v, (int, Fraction)) for v in values) else 0.0)
    return max(s - k + 1, 0 * s)


def lemma_inc_value(spec: CrossSpec, z, k: int | None = None, strategy="auto"):
    """Extremal function of the order-(k-1) hull relative to the order-k hull, at ``z``."""
    k = spec.k if k is None else k
    if not 2 <= k <= spec.N:
        raise BadOrder(f"need 2 <= k <= N, got k={k}, N={spec.N}")
    vals = factor_values(spec, z, strategy)
    if np.any(vals.sum(axis=-1) >= k):
        raise NotInHull(f"point is not in the order-{k} hull")
    out = lemma_formula(vals, k)
    return float(out) if np.ndim(out) == 0 else out


# ---- composite two-fold hulls --------------------------------------------------------------

@dataclass(frozen=True)
class CompositeHull2:
    """Two-fold composite hull split at ``factor`` (0-based, default the last one).

    ``'Zs'``: first base is the center of the order-k cross over the remaining
    factors; its extremal function is the max of the factor values, which is
    exact only when the order-k hull of N-1 factors is the whole polydisc
    (k = N-1).
    ``'Z'``: first base is the order-(k-1) cross over the remaining factors,
    whose extremal function relative to the order-k hull is ``lemma_formula``.
    """

    spec: CrossSpec
    variant: str = "Z"
    factor: int | None = None

    def __post_init__(self):
        N, k = self.spec.N, self.spec.k
        if self.variant not in ("Z", "Zs"):
            raise ValueError("variant must be 'Z' or 'Zs'")
        f = N - 1 if self.factor is None else int(self.factor)
        if not 0 <= f < N:
            raise ValueError(f"factor index {f} out of range for N={N}")
        object.__setattr__(self, "factor", f)
        if N < 2 or not 1 <= k <= N - 1:
            raise BadOrder(f"composite hull needs 1 <= k <= N-1, got k={k}, N={N}")
        if self.variant == "Z" and k < 2:
            raise BadOrder("variant Z needs k >= 2 (its first base is the order-(k-1) cross)")
        if self.variant == "Zs" and k != N - 1:
            raise UnsupportedComposite("variant Zs has a closed-form extremal function only for k = N-1")

    @property
    def rest(self) -> list:
        return [j for j in range(self.spec.N) if j != self.factor]


def composite_formula(values, k, variant: str, factor: int):
    """Composite value from the factor values of one point (sequence, Fraction-safe)."""
    values = list(values)
    rest = [v for j, v in enumerate(values) if j != factor]
    if variant == "Zs":
        first = max(rest)
    else:
        first = lemma_formula(rest, k)
    return first + values[factor]


def composite_hull2_value(c: CompositeHull2, z, strategy="auto"):
    """Composite value at ``z``; membership in the composite hull is value < 1."""
    vals = factor_values(c.spec, z, strategy)
    rest = vals[..., c.rest]
    if np.any(rest.sum(axis=-1) >= c.spec.k):
        raise NotInHull("the remaining coordinates are not in the order-k hull of N-1 factors")
    if c.variant == "Zs":
        first = rest.max(axis=-1)
    else:
        first = lemma_formula(rest, c.spec.k)
    out = first + vals[..., c.factor]
    return float(out) if np.ndim(out) == 0 else out


def composite_mask(c: CompositeHull2, Z, strategy="auto") -> np.ndarray:
    """Membership in the composite hull for (n, N) points; False where the first part leaves its hull."""
    vals = factor_values(c.spec, np.atleast_2d(Z), strategy)
    rest = vals[:, c.rest]
    first = rest.max(axis=1) if c.variant == "Zs" else lemma_formula(rest, c.spec.k)
    return (rest.sum(axis=1) < c.spec.k) & (first + vals[:, c.factor] < 1)


def composite_value_batch(c: CompositeHull2, Z, strategy="auto") -> tuple[np.ndarray, np.ndarray]:
    """(value, first-part-in-hull mask) without raising, for agreement scans."""
    vals = factor_values(c.spec, np.atleast_2d(Z), strategy)
    rest = vals[:, c.rest]
    first = rest.max(axis=1) if c.variant == "Zs" else lemma_formula(rest, c.spec.k)
    return first + vals[:, c.factor], rest.sum(axis=1) < c.spec.k


# ---- sampling and export -----------------------------------------------------------------------

def sample_hull(spec: CrossSpec, count: int, seed: int, strategy="auto", max_draws: int | None = None,
                p_base: float = 0.5) -> np.ndarray:
    """Rejection samples of the hull; each coordinate comes from A_j with probability ``p_base``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    cap = max_draws if max_draws is not None else 1000 * count
    got, drawn = [], 0
    batch = max(64, 2 * count)
    while sum(len(g) for g in got) < count:
        if drawn >= cap:
            raise SamplingExhausted(f"only {sum(len(g) for g in got)} of {count} hull points after {drawn} draws")
        m = min(batch, cap - drawn)
        Z = np.empty((m, spec.N), dtype=complex)
        for j, p in enumerate(spec.pairs):
            fromA = rng.uniform(size=m) < p_base
            Z[:, j] = np.where(fromA, p.A.sample(rng, m), p.D.sample(rng, m))
        drawn += m
        got.append(Z[hull_mask(spec, Z, strategy)])
    return np.concatenate(got)[:count]


def shrink_toward_center(spec: CrossSpec, Z, factor: float) -> np.ndarray:
    """Scale each coordinate toward its domain center by ``factor``."""
    Z = np.asarray(Z, dtype=complex)
    c = np.array([p.D.center for p in spec.pairs])
    return c + factor * (Z - c)


@dataclass
class SliceField:
    factor: int
    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # (ny, nx), NaN outside the factor domain

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["re", "im", "value"])
            for iy, y in enumerate(self.ys):
                for ix, x in enumerate(self.xs):
                    v = self.values[iy, ix]
                    if np.isfinite(v):
                        w.writerow([f"{x:.17g}", f"{y:.17g}", f"{v:.17g}"])


def slice_grid(spec: CrossSpec, factor: int, fixed, resolution: int, strategy="auto") -> SliceField:
    """Hull value over a grid on D_factor with the other coordinates frozen at ``fixed``.

    ``fixed`` lists the N-1 frozen coordinates in factor order.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    N = spec.N
    if not 0 <= factor < N:
        raise ValueError(f"factor index {factor} out of range")
    fixed = np.asarray(fixed, dtype=complex).ravel()
    if fixed.size != N - 1:
        raise ValueError(f"need {N - 1} frozen coordinates, got {fixed.size}")
    rest = [j for j in range(N) if j != factor]
    for j, v in zip(rest, fixed):
        if not spec.pairs[j].D.contains(v):
            raise OutsideAmbient(f"frozen coordinate of factor {j} lies outside its domain")
    D = spec.pairs[factor].D
    xs = np.linspace(D.center.real - D.radius, D.center.real + D.radius, resolution)
    ys = np.linspace(D.center.imag - D.radius, D.center.imag + D.radius, resolution)
    G = xs[None, :] + 1j * ys[:, None]
    inside = D.contains(G)
    Z = np.empty((int(inside.sum()), N), dtype=complex)
    Z[:, rest] = fixed
    Z[:, factor] = G[inside]
    values = np.full(G.shape, np.nan)
    values[inside] = hull_value(spec, Z, strategy)
    return SliceField(factor, xs, ys, values)


# ---- plurisubharmonicity probe ----------------------------------------------------------------

SUBMEAN_NODES = 64
SUBMEAN_RADIUS = 1e-3  # fraction of the smallest factor radius


def submean_defect(func, z, direction, radius: float, nodes: int = SUBMEAN_NODES) -> float:
    """Circle mean minus center value of ``func`` along ``z + radius e^{it} direction``.

    A plurisubharmonic function gives a value >= 0 (trapezoid rule, ``nodes`` points).
    """
    z = np.asarray(z, dtype=complex)
    v = np.asarray(direction, dtype=complex)
    v = v / np.linalg.norm(v)
    t = 2 * np.pi * np.arange(nodes) / nodes
    ring = z[None, :] + radius * np.exp(1j * t)[:, None] * v[None, :]
    return float(np.mean(func(ring)) - func(z[None, :])[0])
