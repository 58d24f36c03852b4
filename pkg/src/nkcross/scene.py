"""Scene files: a JSON description of a cross with its singular data.

Schema ``nkcross.scene/1``::

    {
      "schema": "nkcross.scene/1",
      "factors": [{"domain": {...}, "base": {...}}, ...],
      "k": 2,
      "variant": "X" | "T" | "Y",
      "sigmas": {"110": {"kind": "points", "list": [[[re, im]]]}, ...},
      "M": {"kind": "polyzero", "vars": [0, 1], "coeffs": ...},
      "tolerances": {"grid": 513, "solver_tol": 1e-10, "margin": 1e-6}
    }

Only ``schema``, ``factors`` and ``k`` are required.  Unknown keys anywhere
are errors.  Sigma keys are bit strings; their entries live over the zero
positions of the key, in increasing order.  ``M`` lives over all N
coordinates.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .cross import CrossSpec, from_bits, zeros_of
from .errors import NKCrossError, SceneError
from .extremal import DEFAULT_GRID, DEFAULT_TOL
from .geometry import pair_from_json
from .hull import DEFAULT_MARGIN
from .singular import SingularSet, singular_from_json

SCHEMA = "nkcross.scene/1"
_TOP = {"schema", "factors", "k", "variant", "sigmas", "M", "tolerances"}
_TOL_KEYS = {"grid", "solver_tol", "margin"}


@dataclass(eq=False)
class Scene:
    spec: CrossSpec
    M: SingularSet
    tolerances: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict)

    @property
    def grid(self) -> int:
        return int(self.tolerances.get("grid", DEFAULT_GRID))

    @property
    def solver_tol(self) -> float:
        return float(self.tolerances.get("solver_tol", DEFAULT_TOL))

    @property
    def margin(self) -> float:
        return float(self.tolerances.get("margin", DEFAULT_MARGIN))

    def digest(self) -> str:
        return hashlib.sha256(canonical_json(self.source).encode()).hexdigest()


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def scene_from_dict(obj: dict) -> Scene:
    if not isinstance(obj, dict):
        raise SceneError("scene must be a JSON object")
    extra = set(obj) - _TOP
    if extra:
        raise SceneError(f"unknown scene keys: {sorted(extra)}")
    if obj.get("schema") != SCHEMA:
        raise SceneError(f"expected schema {SCHEMA!r}, got {obj.get('schema')!r}")
    try:
        pairs = tuple(pair_from_json(f) for f in obj["factors"])
        N = len(pairs)
        sigmas = {}
        for key, entry in obj.get("sigmas", {}).items():
            alpha = from_bits(key)
            if len(alpha) != N:
                raise SceneError(f"sigma key {key!r} has length {len(alpha)}, scene has {N} factors")
            sigmas[alpha] = singular_from_json(entry, zeros_of(alpha))
        spec = CrossSpec(pairs, int(obj["k"]), obj.get("variant", "X"), sigmas)
        M = singular_from_json(obj["M"], range(N)) if "M" in obj else SingularSet.empty(range(N))
        tol = dict(obj.get("tolerances", {}))
        extra = set(tol) - _TOL_KEYS
        if extra:
            raise SceneError(f"unknown tolerance keys: {sorted(extra)}")
    except KeyError as exc:
        raise SceneError(f"missing scene key {exc}") from None
    except SceneError:
        raise
    except (NKCrossError, ValueError, TypeError) as exc:
        raise SceneError(f"invalid scene: {exc}") from None
    return Scene(spec, M, tol, obj)


def _interval_factor():
    return {"domain": {"kind": "disc", "center": [0.0, 0.0], "radius": 1.0},
            "base": {"kind": "interval", "a": -1.0, "b": 1.0}}


# sigma points of the three-factor example; any points of (-1, 1) serve
SIGMA_POINTS = (0.25, -0.5, 0.75)


def _example_sigmas() -> dict:
    s1, s2, s3 = SIGMA_POINTS
    return {"110": {"kind": "points", "list": [[[s3, 0.0]]]},
            "101": {"kind": "points", "list": [[[s2, 0.0]]]},
            "011": {"kind": "points", "list": [[[s1, 0.0]]]}}


BUILTIN = {
    "three-intervals": {"schema": SCHEMA, "factors": [_interval_factor()] * 3, "k": 2, "variant": "X"},
    "three-intervals-T": {"schema": SCHEMA, "factors": [_interval_factor()] * 3, "k": 2, "variant": "T",
                   "sigmas": _example_sigmas()},
    "three-intervals-Y": {"schema": SCHEMA, "factors": [_interval_factor()] * 3, "k": 2, "variant": "Y",
                   "sigmas": _example_sigmas()},
}


def load_scene(ref: str | None) -> Scene:
    """Path to a scene file, ``builtin:<name>``, or None for the three-interval example."""
    if ref is None:
        ref = "builtin:three-intervals"
    if ref.startswith("builtin:"):
        name = ref.split(":", 1)[1]
        if name not in BUILTIN:
            raise SceneError(f"unknown builtin scene {name!r}; choose from {sorted(BUILTIN)}")
        return scene_from_dict(json.loads(json.dumps(BUILTIN[name])))
    path = Path(ref)
    try:
        obj = json.loads(path.read_text())
    except OSError as exc:
        raise SceneError(f"cannot read scene {ref}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise SceneError(f"scene {ref} is not valid JSON: {exc}") from None
    return scene_from_dict(obj)
