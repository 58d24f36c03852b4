"""Planar factor domains, base sets and validated (A, D) pairs.

A factor is a pair ``(A, D)`` where ``D`` is an open disc in the plane and
``A`` is a locally pluriregular subset drawn from a small catalog: closed
segments, closed subdiscs and finite unions of those.  Finite point sets are
pluripolar and are rejected.

All membership predicates accept scalars or numpy arrays of complex numbers
and are vectorized.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import InvalidBase, UnsupportedMap

_EPS = np.finfo(float).eps


def as_complex(value) -> complex:
    """Coerce ``value`` to a finite Python complex (accepts ``[re, im]`` pairs)."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ValueError(f"complex coordinate must be [re, im], got {value!r}")
        value = complex(float(value[0]), float(value[1]))
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite coordinate {z!r}")
    return z


def complex_to_json(z: complex):
    z = complex(z)
    return [z.real, z.imag]


def _snap(z: complex, scale: float = 1.0) -> complex:
    # kill rounding residue so axis-aligned images keep exact membership tests
    re = 0.0 if abs(z.real) < 1e-15 * scale else z.real
    im = 0.0 if abs(z.imag) < 1e-15 * scale else z.imag
    return complex(re, im)


@dataclass(frozen=True)
class Disc:
    """Open disc ``{z : |z - center| < radius}``."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_complex(self.center))
        r = float(self.radius)
        if not (math.isfinite(r) and r > 0):
            raise ValueError(f"disc radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        dx = z.real - self.center.real
        dy = z.imag - self.center.imag
        out = dx * dx + dy * dy < self.radius * self.radius
        return bool(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        r = self.radius * np.sqrt(rng.uniform(size=n))
        t = rng.uniform(0.0, 2 * np.pi, size=n)
        return self.center + r * np.exp(1j * t)

    def to_json(self) -> dict:
        return {"kind": "disc", "center": complex_to_json(self.center), "radius": self.radius}


PlanarDomain = Disc
UNIT_DISC = Disc(0j, 1.0)


def domain_contains(D: Disc, z) -> bool:
    return D.contains(z)


@dataclass(frozen=True)
class Segment:
    """Closed segment ``[p, q]``."""

    p: complex
    q: complex

    def __post_init__(self):
        object.__setattr__(self, "p", as_complex(self.p))
        object.__setattr__(self, "q", as_complex(self.q))

    @property
    def direction(self) -> complex:
        return self.q - self.p

    @property
    def axis_aligned(self) -> bool:
        d = self.direction
        return d.real == 0.0 or d.imag == 0.0

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        d = self.direction
        w = z - self.p
        cross = d.real * w.imag - d.imag * w.real
        dot = d.real * w.real + d.imag * w.imag
        dd = d.real * d.real + d.imag * d.imag
        # exact for real/imaginary intervals; 1-ulp slack for oblique ones
        tol = 0.0 if self.axis_aligned else 16 * _EPS * dd
        out = (np.abs(cross) <= tol) & (dot >= 0.0) & (dot <= dd)
        return bool(out) if out.ndim == 0 else out

    def anchor(self) -> complex:
        return 0.5 * (self.p + self.q)

    def sample(self, rng, n, dist="uniform"):
        if dist == "arcsine":
            t = 0.5 - 0.5 * np.cos(np.pi * rng.uniform(size=n))
        else:
            t = rng.uniform(size=n)
        # endpoints may lie on the boundary of the domain
        eps = np.finfo(float).eps
        t = np.clip(t, eps, 1.0 - eps)
        return self.p + t * self.direction

    def to_json(self) -> dict:
        if self.p.imag == 0.0 and self.q.imag == 0.0:
            return {"kind": "interval", "a": self.p.real, "b": self.q.real}
        return {"kind": "segment", "p": complex_to_json(self.p), "q": complex_to_json(self.q)}


@dataclass(frozen=True)
class SubDisc:
    """Closed disc ``{z : |z - center| <= radius}``."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        dx = z.real - self.center.real
        dy = z.imag - self.center.imag
        out = dx * dx + dy * dy <= self.radius * self.radius
        return bool(out) if out.ndim == 0 else out

    def anchor(self) -> complex:
        return self.center

    def sample(self, rng, n, dist="uniform"):
        if dist == "boundary":
            r = np.full(n, self.radius)
        else:
            r = self.radius * np.sqrt(rng.uniform(size=n))
        t = rng.uniform(0.0, 2 * np.pi, size=n)
        return self.center + r * np.exp(1j * t)

    def to_json(self) -> dict:
        return {"kind": "disc", "center": complex_to_json(self.center), "radius": self.radius}


@dataclass(frozen=True)
class FinitePoints:
    """A finite point set. Pluripolar, hence never an admissible base."""

    points: tuple

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=bool)
        for p in self.points:
            out |= z == p
        return bool(out) if out.ndim == 0 else out

    def to_json(self) -> dict:
        return {"kind": "points", "list": [complex_to_json(p) for p in self.points]}


Piece = Union[Segment, SubDisc, FinitePoints]


@dataclass(frozen=True)
class BaseSet:
    """Finite union of catalog pieces."""

    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def interval(cls, a: float, b: float) -> "BaseSet":
        return cls((Segment(complex(a), complex(b)),))

    @classmethod
    def segment(cls, p, q) -> "BaseSet":
        return cls((Segment(p, q),))

    @classmethod
    def subdisc(cls, center, radius) -> "BaseSet":
        return cls((SubDisc(center, radius),))

    @classmethod
    def points(cls, pts: Iterable) -> "BaseSet":
        return cls((FinitePoints(tuple(as_complex(p) for p in pts)),))

    @classmethod
    def union(cls, *sets: "BaseSet") -> "BaseSet":
        return cls(tuple(p for s in sets for p in s.pieces))

    @property
    def kind(self) -> str:
        if len(self.pieces) != 1:
            return "union"
        p = self.pieces[0]
        if isinstance(p, Segment):
            return "interval" if p.to_json()["kind"] == "interval" else "segment"
        if isinstance(p, SubDisc):
            return "disc"
        return "points"

    def contains(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=bool)
        for piece in self.pieces:
            out |= piece.contains(z)
        return bool(out) if out.ndim == 0 else out

    def anchor(self) -> complex:
        """Midpoint of the first segment piece, else the first subdisc center."""
        for piece in self.pieces:
            if isinstance(piece, Segment):
                return piece.anchor()
        return self.pieces[0].anchor()

    def sample(self, rng: np.random.Generator, n: int, dist: str = "uniform") -> np.ndarray:
        if len(self.pieces) == 1:
            return self.pieces[0].sample(rng, n, dist)
        which = rng.integers(len(self.pieces), size=n)
        out = np.empty(n, dtype=complex)
        for i, piece in enumerate(self.pieces):
            sel = which == i
            out[sel] = piece.sample(rng, int(sel.sum()), dist)
        return out

    def to_json(self) -> dict:
        if len(self.pieces) == 1:
            return self.pieces[0].to_json()
        return {"kind": "union", "pieces": [p.to_json() for p in self.pieces]}


@dataclass(frozen=True)
class PairAD:
    """A validated factor ``(A, D)``. Build through :func:`make_pair`."""

    A: BaseSet
    D: Disc

    def to_json(self) -> dict:
        return {"domain": self.D.to_json(), "base": self.A.to_json()}


def _check_piece(piece, D: Disc) -> None:
    c, R = D.center, D.radius
    slack = R * (1 + 1e-12)
    if isinstance(piece, FinitePoints):
        raise InvalidBase("finite point sets are pluripolar and cannot serve as a base")
    if isinstance(piece, Segment):
        if piece.p == piece.q:
            raise InvalidBase("degenerate segment (a single point) is pluripolar")
        # endpoints may sit on the boundary circle; the open chord is then inside D
        if abs(piece.p - c) > slack or abs(piece.q - c) > slack:
            raise InvalidBase("segment leaves the closure of the domain")
        return
    if isinstance(piece, SubDisc):
        if not piece.radius > 0:
            raise InvalidBase("subdisc of radius 0 is a point, which is pluripolar")
        if piece.center == c and piece.radius == R:
            return  # base fills the whole domain
        if abs(piece.center - c) + piece.radius >= R:
            raise InvalidBase("closed subdisc is not contained in the domain")
        return
    raise InvalidBase(f"unsupported base piece {piece!r}")


def make_pair(A: BaseSet, D: Disc) -> PairAD:
    if not isinstance(A, BaseSet):
        A = BaseSet((A,))
    if not A.pieces:
        raise InvalidBase("empty base set")
    for piece in A.pieces:
        _check_piece(piece, D)
    return PairAD(A, D)


def unit_interval_pair() -> PairAD:
    """``((-1, 1), unit disc)``, the factor used throughout the worked example."""
    return make_pair(BaseSet.interval(-1.0, 1.0), UNIT_DISC)


@dataclass(frozen=True)
class DiscAutomorphism:
    """``z -> exp(i theta) (z - a) / (1 - conj(a) z)`` acting on the normalized disc.

    On a disc with center ``c`` and radius ``R`` the map is conjugated by
    ``w = (z - c) / R``, so it is an automorphism of that disc.
    """

    theta: float = 0.0
    a: complex = 0j

    def __post_init__(self):
        th = float(self.theta)
        try:
            a = as_complex(self.a)
        except ValueError as exc:
            raise UnsupportedMap(str(exc)) from None
        if not math.isfinite(th):
            raise UnsupportedMap("rotation angle must be finite")
        if not abs(a) < 1:
            raise UnsupportedMap(f"|a| must be < 1 for a disc automorphism, got {a!r}")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "a", a)

    @property
    def rotation(self) -> complex:
        # exact values at multiples of pi/2 keep rotated intervals axis-aligned
        q = self.theta / (math.pi / 2)
        if q == round(q):
            return (1, 1j, -1, -1j)[int(round(q)) % 4]
        return cmath.exp(1j * self.theta)

    def on_unit(self, w):
        return self.rotation * (w - self.a) / (1 - np.conj(self.a) * w)

    def __call__(self, z, D: Disc = UNIT_DISC):
        z = np.asarray(z, dtype=complex)
        out = D.center + D.radius * self.on_unit((z - D.center) / D.radius)
        return complex(out) if out.ndim == 0 else out


def _circumcircle(z1: complex, z2: complex, z3: complex) -> tuple[complex, float]:
    a = np.array([[2 * (z2 - z1).real, 2 * (z2 - z1).imag], [2 * (z3 - z1).real, 2 * (z3 - z1).imag]])
    b = np.array([abs(z2) ** 2 - abs(z1) ** 2, abs(z3) ** 2 - abs(z1) ** 2])
    x, y = np.linalg.solve(a, b)
    c = complex(x, y)
    return c, abs(z1 - c)


def _transport_piece(piece, phi: DiscAutomorphism, D: Disc):
    if isinstance(piece, Segment):
        if phi.a != 0:
            # only the diameter through a is mapped onto a straight line
            pn = (piece.p - D.center) / D.radius
            qn = (piece.q - D.center) / D.radius
            for w in (pn, qn):
                if abs((np.conj(phi.a) * w).imag) > 1e-12:
                    raise UnsupportedMap("image of this segment is a circular arc, outside the base catalog")
        return Segment(_snap(phi(piece.p, D), D.radius), _snap(phi(piece.q, D), D.radius))
    if isinstance(piece, SubDisc):
        if piece.center == D.center and piece.radius == D.radius:
            return piece
        ts = np.exp(1j * np.array([0.0, 2 * np.pi / 3, 4 * np.pi / 3]))
        img = [phi(piece.center + piece.radius * t, D) for t in ts]
        c, r = _circumcircle(*img)
        return SubDisc(_snap(c, D.radius), r)
    raise UnsupportedMap(f"cannot transport {piece!r}")


def mobius_transport(pair: PairAD, phi: DiscAutomorphism) -> PairAD:
    """Image of ``pair`` under the disc automorphism ``phi`` (the domain is preserved)."""
    pieces = tuple(_transport_piece(p, phi, pair.D) for p in pair.A.pieces)
    return make_pair(BaseSet(pieces), pair.D)


# ---- scene-file fragments -------------------------------------------------

def base_from_json(obj: dict) -> BaseSet:
    kind = obj.get("kind")
    allowed = {
        "interval": {"kind", "a", "b"},
        "segment": {"kind", "p", "q"},
        "disc": {"kind", "center", "radius"},
        "union": {"kind", "pieces"},
        "points": {"kind", "list"},
    }
    if kind not in allowed:
        raise ValueError(f"unknown base kind {kind!r}")
    extra = set(obj) - allowed[kind]
    if extra:
        raise ValueError(f"unknown keys in base: {sorted(extra)}")
    if kind == "interval":
        return BaseSet.interval(float(obj["a"]), float(obj["b"]))
    if kind == "segment":
        return BaseSet.segment(obj["p"], obj["q"])
    if kind == "disc":
        return BaseSet.subdisc(obj["center"], obj["radius"])
    if kind == "points":
        return BaseSet.points(obj["list"])
    return BaseSet.union(*(base_from_json(p) for p in obj["pieces"]))


def domain_from_json(obj: dict) -> Disc:
    if obj.get("kind") != "disc":
        raise ValueError(f"only disc domains are supported, got {obj.get('kind')!r}")
    extra = set(obj) - {"kind", "center", "radius"}
    if extra:
        raise ValueError(f"unknown keys in domain: {sorted(extra)}")
    return Disc(obj["center"], obj["radius"])


def pair_from_json(obj: dict) -> PairAD:
    extra = set(obj) - {"domain", "base"}
    if extra:
        raise ValueError(f"unknown keys in factor: {sorted(extra)}")
    return make_pair(base_from_json(obj["base"]), domain_from_json(obj["domain"]))


def pairs_from_json(objs: Sequence[dict]) -> tuple[PairAD, ...]:
    return tuple(pair_from_json(o) for o in objs)
