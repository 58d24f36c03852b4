"""Multi-indices, crosses of order k and their generalized (Σ-thinned) variants.

A multi-index ``alpha`` is a tuple of 0/1 of length N.  ``X_alpha`` is the
product that puts ``D_j`` where ``alpha_j = 1`` and ``A_j`` where
``alpha_j = 0``.  The cross of order k is the union of ``X_alpha`` over all
``|alpha| = k``.  The T-variant removes from each branch the points whose
α-zero part lies in ``Σ_alpha``; the Y-variant does the same over all
``1 <= |alpha| <= k``.

Points are 1-d complex arrays of length N; batch routines take (n, N).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import BadOrder, LengthMismatch, NotMember, OutsideAmbient, SamplingExhausted
from .geometry import PairAD
from .singular import SingularSet

MultiIndex = tuple
VARIANTS = ("X", "T", "Y")
BLOCK_MISS = "A-coordinate-miss"
BLOCK_SIGMA = "sigma-hit"


def bits(alpha) -> str:
    return "".join(str(int(b)) for b in alpha)


def from_bits(s: str) -> MultiIndex:
    if not s or set(s) - {"0", "1"}:
        raise ValueError(f"bad multi-index string {s!r}")
    return tuple(int(c) for c in s)


def weight(alpha) -> int:
    return int(sum(alpha))


def zeros_of(alpha) -> tuple:
    return tuple(j for j, b in enumerate(alpha) if b == 0)


def ones_of(alpha) -> tuple:
    return tuple(j for j, b in enumerate(alpha) if b == 1)


def gen_family(N: int, k: int, which: str = "I") -> list:
    """Weight-k indices (``I``) or indices of weight 1..k (``J``), lexicographic."""
    if N < 1 or not 1 <= k <= N:
        raise BadOrder(f"need 1 <= k <= N, got N={N}, k={k}")
    if which == "I":
        keep = lambda w: w == k  # noqa: E731
    elif which == "J":
        keep = lambda w: 1 <= w <= k  # noqa: E731
    else:
        raise ValueError(f"family must be 'I' or 'J', got {which!r}")
    return [a for a in itertools.product((0, 1), repeat=N) if keep(sum(a))]


def merge(alpha, c0, c1) -> np.ndarray:
    """Interleave ``c0`` into the α-zero slots and ``c1`` into the α-one slots."""
    alpha = tuple(alpha)
    c0 = np.atleast_1d(np.asarray(c0, dtype=complex))
    c1 = np.atleast_1d(np.asarray(c1, dtype=complex))
    w = weight(alpha)
    if c0.shape[-1] != len(alpha) - w or c1.shape[-1] != w:
        raise LengthMismatch(f"index {bits(alpha)} needs {len(alpha) - w} + {w} coordinates, "
                             f"got {c0.shape[-1]} + {c1.shape[-1]}")
    lead = np.broadcast_shapes(c0.shape[:-1], c1.shape[:-1])
    out = np.empty(lead + (len(alpha),), dtype=complex)
    out[..., list(zeros_of(alpha))] = c0
    out[..., list(ones_of(alpha))] = c1
    return out


def project(z, alpha, side: int) -> np.ndarray:
    """Ordered coordinates of ``z`` in the slots where ``alpha_j == side``."""
    z = np.asarray(z, dtype=complex)
    alpha = tuple(alpha)
    if z.shape[-1] != len(alpha):
        raise LengthMismatch(f"point has {z.shape[-1]} coordinates, index has {len(alpha)}")
    if side not in (0, 1):
        raise ValueError("side must be 0 or 1")
    idx = zeros_of(alpha) if side == 0 else ones_of(alpha)
    return z[..., list(idx)]


@dataclass(frozen=True, eq=False)
class CrossSpec:
    """Factors, order and variant of a (generalized) cross.

    ``sigmas`` maps multi-indices to descriptors over the α-zero coordinates;
    missing keys mean Σ is empty.
    """

    pairs: tuple
    k: int
    variant: str = "X"
    sigmas: dict = field(default_factory=dict)

    def __post_init__(self):
        pairs = tuple(self.pairs)
        object.__setattr__(self, "pairs", pairs)
        N = len(pairs)
        if not all(isinstance(p, PairAD) for p in pairs):
            raise TypeError("factors must be PairAD instances (see geometry.make_pair)")
        if N < 1 or not 1 <= self.k <= N:
            raise BadOrder(f"need 1 <= k <= N, got N={N}, k={self.k}")
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        sig = {tuple(int(b) for b in a): s for a, s in dict(self.sigmas).items()}
        if sig and self.variant == "X":
            raise ValueError("the plain cross X takes no sigma sets")
        fam = set(gen_family(N, self.k, "I" if self.variant == "T" else "J"))
        for a, s in sig.items():
            if len(a) != N:
                raise LengthMismatch(f"sigma key {bits(a)} has length {len(a)}, expected {N}")
            if a not in fam:
                raise ValueError(f"sigma key {bits(a)} is outside the index family of variant {self.variant}")
            if not isinstance(s, SingularSet):
                raise TypeError("sigma values must be SingularSet descriptors")
            if s.coords != zeros_of(a):
                raise ValueError(f"sigma for {bits(a)} must live over coordinates {zeros_of(a)}, got {s.coords}")
            if s.kind == "full":
                raise ValueError(f"sigma for {bits(a)} is not pluripolar")
            if s.kind == "points":
                for j_pos, j in enumerate(s.coords):
                    if not np.all(self.pairs[j].A.contains(s.points[:, j_pos])):
                        raise ValueError(f"sigma for {bits(a)} has a coordinate outside base set {j}")
        object.__setattr__(self, "sigmas", sig)

    @property
    def N(self) -> int:
        return len(self.pairs)

    @property
    def family(self) -> list:
        return gen_family(self.N, self.k, "J" if self.variant == "Y" else "I")

    def sigma(self, alpha) -> SingularSet:
        alpha = tuple(alpha)
        s = self.sigmas.get(alpha)
        return s if s is not None else SingularSet.empty(zeros_of(alpha))

    def with_(self, **changes) -> "CrossSpec":
        kw = dict(pairs=self.pairs, k=self.k, variant=self.variant, sigmas=self.sigmas)
        kw.update(changes)
        if kw["variant"] == "X":
            kw["sigmas"] = {}
        return CrossSpec(**kw)

    def sub(self, indices: Sequence[int], k: int) -> "CrossSpec":
        """Plain cross of order ``k`` over the listed factors."""
        return CrossSpec(tuple(self.pairs[j] for j in indices), k, "X")


@dataclass
class MembershipReport:
    member: bool
    witnesses: list
    blocked: list

    def to_json(self) -> dict:
        return {"member": self.member,
                "witnesses": [bits(a) for a in self.witnesses],
                "blocked": [[bits(a), why] for a, why in self.blocked]}


def _check_point(spec: CrossSpec, z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != spec.N:
        raise LengthMismatch(f"point has {z.shape[-1]} coordinates, cross has {spec.N} factors")
    for j, p in enumerate(spec.pairs):
        inside = p.D.contains(z[..., j])
        if not np.all(inside):
            raise OutsideAmbient(f"coordinate {j} lies outside its domain")
    return z


def a_mask(spec: CrossSpec, Z) -> np.ndarray:
    """Boolean (..., N): coordinate j lies in A_j."""
    Z = np.asarray(Z, dtype=complex)
    out = np.empty(Z.shape, dtype=bool)
    for j, p in enumerate(spec.pairs):
        out[..., j] = p.A.contains(Z[..., j])
    return out


def in_cross(spec: CrossSpec, z) -> MembershipReport:
    z = _check_point(spec, z)
    if z.ndim != 1:
        raise ValueError("in_cross takes a single point; use cross_mask for batches")
    inA = a_mask(spec, z)
    witnesses, blocked = [], []
    for alpha in spec.family:
        zeros = zeros_of(alpha)
        if not all(inA[j] for j in zeros):
            blocked.append((alpha, BLOCK_MISS))
        elif spec.variant != "X" and spec.sigma(alpha).contains(z[list(zeros)]):
            blocked.append((alpha, BLOCK_SIGMA))
        else:
            witnesses.append(alpha)
    return MembershipReport(bool(witnesses), witnesses, blocked)


def cross_mask(spec: CrossSpec, Z) -> np.ndarray:
    """Vectorized membership for points of shape (n, N)."""
    Z = _check_point(spec, np.atleast_2d(Z))
    inA = a_mask(spec, Z)
    out = np.zeros(Z.shape[0], dtype=bool)
    for alpha in spec.family:
        zeros = list(zeros_of(alpha))
        ok = np.all(inA[:, zeros], axis=1)
        if spec.variant != "X" and alpha in spec.sigmas:
            ok &= ~np.asarray(spec.sigma(alpha).contains(Z[:, zeros]), dtype=bool)
        out |= ok
    return out


def miss_count_member(spec: CrossSpec, Z) -> np.ndarray:
    """Plain-cross membership by counting: at most k coordinates outside their base."""
    Z = _check_point(spec, np.atleast_2d(Z))
    return (~a_mask(spec, Z)).sum(axis=1) <= spec.k


def nfold_cross_contains(pairs: Sequence[PairAD], z) -> bool:
    """Classical N-fold cross: the union over j of A_1 x .. x A_{j-1} x D_j x A_{j+1} x .. x A_N."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (len(pairs),):
        raise LengthMismatch("point and factor list differ in length")
    for j in range(len(pairs)):
        if not pairs[j].D.contains(z[j]):
            continue
        if all(pairs[i].A.contains(z[i]) for i in range(len(pairs)) if i != j):
            return True
    return False


def in_center(spec: CrossSpec, z) -> bool:
    z = np.asarray(z, dtype=complex)
    if z.shape[-1] != spec.N:
        raise LengthMismatch(f"point has {z.shape[-1]} coordinates, cross has {spec.N} factors")
    if not all(p.D.contains(z[j]) for j, p in enumerate(spec.pairs)):
        return False
    if not np.all(a_mask(spec, z)):
        return False
    return in_cross(spec, z).member


def decompose_check(spec: CrossSpec, z) -> tuple[bool, bool]:
    """Membership in X_{N,k} and in the two-fold cross (X_{N-1,k-1} x D_N) ∪ (X_{N-1,k} x A_N)."""
    if spec.variant != "X":
        raise ValueError("decomposition identity is stated for the plain cross")
    N, k = spec.N, spec.k
    if N <= 2 or not 2 <= k <= N - 1:
        raise BadOrder(f"decomposition needs N > 2 and 2 <= k <= N-1, got N={N}, k={k}")
    z = _check_point(spec, z)
    lhs = in_cross(spec, z).member
    head = list(range(N - 1))
    zp = z[:-1]
    last = spec.pairs[-1]
    rhs = ((in_cross(spec.sub(head, k - 1), zp).member and last.D.contains(z[-1]))
           or (in_cross(spec.sub(head, k), zp).member and last.A.contains(z[-1])))
    return lhs, bool(rhs)


def decompose_mask(spec: CrossSpec, Z) -> tuple[np.ndarray, np.ndarray]:
    """Batch form of :func:`decompose_check` for points of shape (n, N)."""
    if spec.variant != "X":
        raise ValueError("decomposition identity is stated for the plain cross")
    N, k = spec.N, spec.k
    if N <= 2 or not 2 <= k <= N - 1:
        raise BadOrder(f"decomposition needs N > 2 and 2 <= k <= N-1, got N={N}, k={k}")
    Z = _check_point(spec, np.atleast_2d(Z))
    head = list(range(N - 1))
    last = spec.pairs[-1]
    Zp = Z[:, :-1]
    rhs = ((cross_mask(spec.sub(head, k - 1), Zp) & last.D.contains(Z[:, -1]))
           | (cross_mask(spec.sub(head, k), Zp) & last.A.contains(Z[:, -1])))
    return cross_mask(spec, Z), rhs


def path_to_center(spec: CrossSpec, z) -> list:
    """Polyline from ``z`` into the center of the plain cross.

    The D-coordinates of the lexicographically first witness slide along one
    straight segment to the anchors of their bases; the A-coordinates stay
    put, so every point of the segment stays in that branch.
    """
    if spec.variant != "X":
        raise ValueError("paths are built for the plain cross")
    z = _check_point(spec, z)
    rep = in_cross(spec, z)
    if not rep.member:
        raise NotMember("point is not in the cross")
    inA = a_mask(spec, z)
    if np.all(inA):
        return [z.copy()]
    alpha = rep.witnesses[0]
    end = z.copy()
    for j in ones_of(alpha):
        if not inA[j]:
            end[j] = spec.pairs[j].A.anchor()
    return [z.copy(), end]


def path_samples(path: list, per_segment: int = 64) -> np.ndarray:
    """Points along each leg of a polyline, endpoints included."""
    if len(path) == 1:
        return np.asarray(path, dtype=complex)
    t = np.linspace(0.0, 1.0, per_segment)[:, None]
    legs = [a + t * (b - a) for a, b in zip(path[:-1], path[1:])]
    return np.concatenate(legs, axis=0)


# ---- sampling --------------------------------------------------------------------------

def sample_cross(spec: CrossSpec, n: int, rng: np.random.Generator, dist: str = "uniform") -> np.ndarray:
    """Stratified cross samples: a branch α uniformly, A-coordinates from A_j, the rest from D_j.

    For T/Y variants draws whose α-zero part hits Σ_α are redrawn.
    """
    fam = spec.family
    out = np.empty((n, spec.N), dtype=complex)
    which = rng.integers(len(fam), size=n)
    for i, alpha in enumerate(fam):
        sel = np.nonzero(which == i)[0]
        m = sel.size
        if m == 0:
            continue
        todo = sel
        for _ in range(100):
            for j, p in enumerate(spec.pairs):
                out[todo, j] = p.A.sample(rng, todo.size, dist) if alpha[j] == 0 else p.D.sample(rng, todo.size)
            if alpha not in spec.sigmas:
                break
            zeros = list(zeros_of(alpha))
            hit = np.atleast_1d(spec.sigma(alpha).contains(out[np.ix_(todo, zeros)]))
            todo = todo[hit]
            if todo.size == 0:
                break
        else:
            raise SamplingExhausted(f"could not avoid sigma on branch {bits(alpha)}")
    return out


def sample_ambient(spec: CrossSpec, n: int, rng: np.random.Generator, p_base: float = 0.5,
                   p_sigma: float = 0.0) -> np.ndarray:
    """Each coordinate from A_j with probability ``p_base``, else from D_j.

    With ``p_sigma > 0`` the α-zero part of a random Σ point is planted into
    that fraction of the samples so that Σ-hits occur with positive frequency.
    """
    Z = np.empty((n, spec.N), dtype=complex)
    for j, p in enumerate(spec.pairs):
        fromA = rng.uniform(size=n) < p_base
        Z[:, j] = np.where(fromA, p.A.sample(rng, n), p.D.sample(rng, n))
    pts = [(a, s) for a, s in spec.sigmas.items() if s.kind == "points" and s.coords]
    if p_sigma > 0 and pts:
        plant = np.nonzero(rng.uniform(size=n) < p_sigma)[0]
        for i in plant:
            a, s = pts[rng.integers(len(pts))]
            Z[i, list(s.coords)] = s.points[rng.integers(len(s.points))]
    return Z
