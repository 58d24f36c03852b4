"""Singular-set descriptors: finite point lists and polynomial zero sets.

One descriptor class serves as the Σ-sets of generalized crosses, the
exclusion set M of a separately holomorphic function and the fibers of M.
Every descriptor is attached to an ordered tuple of *global* coordinate
indices; a sub-point handed to ``contains`` is aligned with that tuple.

Pluripolarity is decided by catalog: empty sets, finite sets and proper
zero sets of polynomials are pluripolar, a fiber on which the polynomial
vanishes identically is not.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, UnsupportedSigmaKind

MAX_DEGREE = 8
ZERO_TOL = 1e-12  # relative to the coefficient mass of the evaluated terms

KINDS = ("empty", "points", "polyzero", "full")


class Polynomial:
    """Dense polynomial in the global variables ``vars``.

    ``coeffs[m0, m1, ...]`` multiplies ``z[vars[0]]**m0 * z[vars[1]]**m1 * ...``.
    ``scale`` tracks the coefficient mass before cancellation so that zero
    tests after substitution are relative.
    """

    def __init__(self, coeffs, vars: Sequence[int], scale: float | None = None):
        c = np.array(coeffs, dtype=complex)
        vars = tuple(int(v) for v in vars)
        if c.ndim != len(vars):
            raise DimensionMismatch(f"coefficient tensor has {c.ndim} axes for {len(vars)} variables")
        if len(set(vars)) != len(vars):
            raise ValueError("repeated variable index")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite polynomial coefficient")
        self.coeffs = c
        self.vars = vars
        self.scale = float(np.abs(c).sum()) if scale is None else float(scale)

    @property
    def terms(self):
        idx = np.argwhere(self.coeffs != 0)
        return [(tuple(int(e) for e in m), self.coeffs[tuple(m)]) for m in idx]

    @property
    def degree(self) -> int:
        t = self.terms
        return max((sum(m) for m, _ in t), default=0)

    def is_zero(self) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= ZERO_TOL * max(self.scale, 1e-300)))

    def is_unit(self) -> bool:
        """Nonzero constant: the zero set is empty."""
        if self.is_zero():
            return False
        flat = np.abs(self.coeffs).ravel()
        const = flat[0] if flat.size else 0.0
        rest = flat[1:] if flat.size > 1 else np.zeros(0)
        return bool(np.all(rest <= ZERO_TOL * self.scale) and const > ZERO_TOL * self.scale)

    def __call__(self, sub) -> np.ndarray:
        """Evaluate at points aligned with ``vars``; ``sub`` has shape (..., len(vars))."""
        sub = np.asarray(sub, dtype=complex)
        out = np.zeros(sub.shape[:-1], dtype=complex)
        for m, c in self.terms:
            term = np.full(sub.shape[:-1], c, dtype=complex)
            for i, e in enumerate(m):
                if e:
                    term = term * sub[..., i] ** e
            out = out + term
        return out

    def magnitude(self, sub) -> np.ndarray:
        """Sum of |terms|, the scale against which a value is judged zero."""
        sub = np.asarray(sub, dtype=complex)
        out = np.zeros(sub.shape[:-1])
        for m, c in self.terms:
            term = np.full(sub.shape[:-1], abs(c))
            for i, e in enumerate(m):
                if e:
                    term = term * np.abs(sub[..., i]) ** e
            out = out + term
        return out

    def evaluate_full(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        return self(z[..., list(self.vars)])

    def substitute(self, assign: dict) -> "Polynomial":
        """Fix the variables in ``assign`` (global index -> value)."""
        keep = [i for i, v in enumerate(self.vars) if v not in assign]
        new_vars = tuple(self.vars[i] for i in keep)
        shape = tuple(self.coeffs.shape[i] for i in keep)
        out = np.zeros(shape, dtype=complex)
        scale = 0.0
        for m, c in self.terms:
            val = c
            mag = abs(c)
            for i, e in enumerate(m):
                v = self.vars[i]
                if v in assign and e:
                    val = val * complex(assign[v]) ** e
                    mag = mag * abs(complex(assign[v])) ** e
            out[tuple(m[i] for i in keep)] += val
            scale += mag
        return Polynomial(out, new_vars, scale=scale)

    def to_json(self) -> dict:
        return {"kind": "polyzero", "vars": list(self.vars),
                "coeffs": _tensor_to_json(self.coeffs)}

    def __repr__(self) -> str:
        return f"Polynomial(vars={self.vars}, terms={len(self.terms)})"


def _tensor_to_json(t: np.ndarray):
    if t.ndim == 0:
        return [float(t.real), float(t.imag)]
    return [_tensor_to_json(s) for s in t]


def tensor_from_json(obj, ndim: int) -> np.ndarray:
    """Nested lists of ``[re, im]`` leaves (or real numbers) into a complex tensor."""
    def conv(o, depth):
        if depth == ndim:
            if isinstance(o, (list, tuple)):
                if len(o) != 2:
                    raise ValueError(f"complex leaf must be [re, im], got {o!r}")
                return complex(float(o[0]), float(o[1]))
            return complex(float(o))
        return [conv(s, depth + 1) for s in o]
    arr = np.array(conv(obj, 0), dtype=complex)
    if arr.ndim != ndim:
        raise ValueError("ragged coefficient tensor")
    return arr


def polynomial_from_terms(terms: dict, vars: Sequence[int]) -> Polynomial:
    """Build from ``{exponent tuple: coefficient}``."""
    vars = tuple(vars)
    if not terms:
        raise ValueError("polynomial needs at least one term")
    shape = tuple(max(m[i] for m in terms) + 1 for i in range(len(vars)))
    c = np.zeros(shape, dtype=complex)
    for m, v in terms.items():
        c[tuple(m)] += v
    return Polynomial(c, vars)


def linear_form(weights: dict, constant: complex = 0.0) -> Polynomial:
    """``constant + sum_j weights[j] * z_j``."""
    vars = tuple(sorted(weights))
    terms = {tuple(0 for _ in vars): constant}
    for i, v in enumerate(vars):
        m = [0] * len(vars)
        m[i] = 1
        terms[tuple(m)] = weights[v]
    return polynomial_from_terms(terms, vars)


@dataclass(frozen=True, eq=False)
class SingularSet:
    """Descriptor over the coordinates ``coords`` (global indices, ascending)."""

    kind: str
    coords: tuple
    points: np.ndarray | None = None
    poly: Polynomial | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedSigmaKind(f"unknown singular-set kind {self.kind!r}")
        object.__setattr__(self, "coords", tuple(int(c) for c in self.coords))
        if self.kind == "points":
            pts = np.asarray(self.points, dtype=complex)
            if pts.ndim != 2:
                pts = pts.reshape(-1, len(self.coords)) if self.coords else pts.reshape(-1, 0)
            if pts.shape[0] == 0:
                object.__setattr__(self, "kind", "empty")
                object.__setattr__(self, "points", None)
                return
            if pts.shape[1] != len(self.coords):
                raise DimensionMismatch(f"points have {pts.shape[1]} coordinates, descriptor has {len(self.coords)}")
            # keep first occurrences, in order
            if pts.shape[1]:
                _, first = np.unique(pts, axis=0, return_index=True)
                pts = pts[np.sort(first)]
            else:
                pts = pts[:1]
            pts.setflags(write=False)
            object.__setattr__(self, "points", pts)
        elif self.kind == "polyzero":
            p = self.poly
            if p is None:
                raise ValueError("polyzero descriptor needs a polynomial")
            if not set(p.vars) <= set(self.coords):
                raise DimensionMismatch(f"polynomial variables {p.vars} not among coordinates {self.coords}")
            if p.is_zero():
                raise ValueError("polynomial vanishes identically; its zero set is not pluripolar")
            if p.degree > MAX_DEGREE:
                raise ValueError(f"total degree {p.degree} exceeds {MAX_DEGREE}")

    @classmethod
    def empty(cls, coords: Iterable[int] = ()) -> "SingularSet":
        return cls("empty", tuple(coords))

    @classmethod
    def from_points(cls, coords: Iterable[int], points) -> "SingularSet":
        coords = tuple(coords)
        pts = np.asarray(points, dtype=complex)
        pts = pts.reshape(-1, len(coords)) if coords else np.zeros((len(pts), 0), complex)
        return cls("points", coords, pts)

    @classmethod
    def zero_set(cls, coords: Iterable[int], poly: Polynomial) -> "SingularSet":
        return cls("polyzero", tuple(coords), poly=poly)

    @classmethod
    def full(cls, coords: Iterable[int]) -> "SingularSet":
        return cls("full", tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def contains(self, sub) -> np.ndarray | bool:
        """Membership of sub-points aligned with ``coords``; shape (..., dim)."""
        sub = np.asarray(sub, dtype=complex)
        if sub.shape[-1:] != (self.dim,) and not (self.dim == 0 and sub.ndim >= 1 and sub.shape[-1] == 0):
            raise DimensionMismatch(f"expected {self.dim} coordinates, got shape {sub.shape}")
        lead = sub.shape[:-1]
        if self.kind == "empty":
            out = np.zeros(lead, dtype=bool)
        elif self.kind == "full":
            out = np.ones(lead, dtype=bool)
        elif self.kind == "points":
            out = np.zeros(lead, dtype=bool)
            for row in self.points:
                out |= np.all(sub == row, axis=-1)
        else:
            pos = [self.coords.index(v) for v in self.poly.vars]
            s = sub[..., pos]
            out = np.abs(self.poly(s)) <= ZERO_TOL * np.maximum(self.poly.magnitude(s), 1e-300)
        return bool(out) if out.ndim == 0 else out

    def contains_full(self, z) -> np.ndarray | bool:
        """Membership of full points, picking out ``coords``."""
        z = np.asarray(z, dtype=complex)
        return self.contains(z[..., list(self.coords)])

    def to_json(self) -> dict:
        if self.kind == "empty":
            return {"kind": "points", "list": []}
        if self.kind == "points":
            return {"kind": "points", "list": [[[p.real, p.imag] for p in row] for row in self.points]}
        if self.kind == "polyzero":
            return self.poly.to_json()
        return {"kind": "full"}


SigmaSet = SingularSet
MSpec = SingularSet
FiberSet = SingularSet


def singular_from_json(obj: dict, coords: Sequence[int]) -> SingularSet:
    """Scene-file entry -> descriptor over ``coords``.

    ``{"kind": "points", "list": [[z, ...], ...]}`` lists sub-points (each ``z``
    is ``[re, im]``); ``{"kind": "polyzero", "vars": [...], "coeffs": tensor}``
    gives a polynomial in the listed global variables.
    """
    coords = tuple(coords)
    kind = obj.get("kind")
    if kind == "points":
        extra = set(obj) - {"kind", "list"}
        if extra:
            raise ValueError(f"unknown keys in points set: {sorted(extra)}")
        rows = obj["list"]
        if not rows:
            return SingularSet.empty(coords)
        pts = []
        for row in rows:
            if len(row) != len(coords):
                raise DimensionMismatch(f"point {row!r} must have {len(coords)} coordinates")
            pts.append([complex(float(c[0]), float(c[1])) if isinstance(c, (list, tuple)) else complex(c) for c in row])
        return SingularSet.from_points(coords, np.array(pts, dtype=complex).reshape(len(pts), len(coords)))
    if kind == "polyzero":
        extra = set(obj) - {"kind", "vars", "coeffs"}
        if extra:
            raise ValueError(f"unknown keys in polyzero set: {sorted(extra)}")
        vars = tuple(int(v) for v in obj["vars"])
        poly = Polynomial(tensor_from_json(obj["coeffs"], len(vars)), vars)
        return SingularSet.zero_set(coords, poly)
    raise UnsupportedSigmaKind(f"unsupported singular-set kind {kind!r}")


def fiber(m: SingularSet, a, alpha: Sequence[int]) -> SingularSet:
    """Slice of ``m`` (over all N coordinates) at the α-zero sub-point ``a``.

    The result lives over the α-one coordinates.
    """
    alpha = tuple(int(b) for b in alpha)
    N = len(alpha)
    if m.coords != tuple(range(N)):
        raise DimensionMismatch(f"descriptor over {m.coords} cannot be fibered with a length-{N} index")
    zeros = [j for j in range(N) if alpha[j] == 0]
    ones = [j for j in range(N) if alpha[j] == 1]
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    if a.shape != (len(zeros),):
        raise DimensionMismatch(f"sub-point has {a.size} coordinates, index has {len(zeros)} zeros")
    if m.kind in ("empty", "full"):
        return SingularSet(m.kind, tuple(ones))
    if m.kind == "points":
        pts = m.points
        hit = np.all(pts[:, zeros] == a, axis=1) if zeros else np.ones(len(pts), dtype=bool)
        if not hit.any():
            return SingularSet.empty(ones)
        if not ones:
            return SingularSet.full(())
        return SingularSet.from_points(ones, pts[hit][:, ones])
    sub = m.poly.substitute({j: a[i] for i, j in enumerate(zeros)})
    if sub.is_zero():
        return SingularSet.full(ones)
    if sub.is_unit():
        return SingularSet.empty(ones)
    return SingularSet.zero_set(ones, sub)


def is_pluripolar(s: SingularSet) -> bool:
    """Catalog decision: everything but a full fiber is pluripolar."""
    return s.kind != "full"


# ---- Δ sets --------------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaSet:
    """Finite union of partial assignments; ``None`` entries range over all of ``A_j``."""

    N: int
    rows: tuple

    @property
    def is_empty(self) -> bool:
        return not self.rows

    def contains(self, a) -> np.ndarray | bool:
        """Membership of center candidates ``a`` (assumed to lie in the A-product)."""
        a = np.asarray(a, dtype=complex)
        out = np.zeros(a.shape[:-1], dtype=bool)
        for row in self.rows:
            ok = np.ones(a.shape[:-1], dtype=bool)
            for j, v in enumerate(row):
                if v is not None:
                    ok &= a[..., j] == v
            out |= ok
        return bool(out) if out.ndim == 0 else out

    def to_json(self) -> list:
        return [[None if v is None else [v.real, v.imag] for v in row] for row in self.rows]


def _intersect(N: int, constraints: list) -> DeltaSet:
    """Intersect constraints 'a restricted to coords lies in points'."""
    current = [tuple([None] * N)]
    for coords, pts in constraints:
        nxt = []
        for row in current:
            for p in pts:
                new = list(row)
                ok = True
                for j, v in zip(coords, p):
                    v = complex(v)
                    if new[j] is None:
                        new[j] = v
                    elif new[j] != v:
                        ok = False
                        break
                if ok:
                    nxt.append(tuple(new))
        current = list(dict.fromkeys(nxt))
        if not current:
            break
    return DeltaSet(N, tuple(current))


def delta_sets(spec) -> tuple[DeltaSet, DeltaSet]:
    """(intersection over the weight-k family I, intersection over the family J) of ``{a : a_α ∈ Σ_α}``."""
    from .cross import gen_family

    N, k = spec.N, spec.k
    out = []
    for which in ("I", "J"):
        constraints = []
        for alpha in gen_family(N, k, which):
            s = spec.sigma(alpha)
            zeros = tuple(j for j in range(N) if alpha[j] == 0)
            if s.kind == "empty":
                constraints.append((zeros, []))
            elif s.kind == "points":
                constraints.append((zeros, [tuple(r) for r in s.points]))
            else:
                raise UnsupportedSigmaKind(f"cannot intersect Σ of kind {s.kind!r} symbolically")
        out.append(_intersect(N, constraints))
    return out[0], out[1]
