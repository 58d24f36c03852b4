import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nkcross.errors import InvalidBase, UnsupportedMap
from nkcross.geometry import (UNIT_DISC, BaseSet, Disc, DiscAutomorphism, as_complex, base_from_json,
                              make_pair, mobius_transport, pair_from_json, unit_interval_pair)

finite = st.floats(-0.95, 0.95, allow_nan=False)


def test_disc_is_open():
    assert UNIT_DISC.contains(0.5j)
    assert not UNIT_DISC.contains(1.0)
    assert not UNIT_DISC.contains(-1j)


def test_interval_is_closed_segment():
    A = BaseSet.interval(-1, 1)
    assert A.contains(-1.0) and A.contains(1.0) and A.contains(0.3)
    assert not A.contains(0.3 + 1e-12j)
    assert A.kind == "interval"


def test_segment_membership_off_axis():
    A = BaseSet.segment(0.1 + 0.1j, 0.5 + 0.3j)
    assert A.contains(0.3 + 0.2j)
    assert not A.contains(0.3 + 0.21j)
    assert A.kind == "segment"


def test_subdisc_and_union():
    A = BaseSet.union(BaseSet.subdisc(0.5, 0.1), BaseSet.interval(-0.5, 0.0))
    assert A.kind == "union"
    assert A.contains(0.55) and A.contains(-0.25) and not A.contains(0.2)


@pytest.mark.parametrize("base", [
    BaseSet.points([0.1, 0.2]),
    BaseSet.segment(0.2, 0.2),
    BaseSet.subdisc(0.5, 0.6),
    BaseSet.interval(-1.5, 0.5),
])
def test_invalid_bases_rejected(base):
    with pytest.raises(InvalidBase):
        make_pair(base, UNIT_DISC)


def test_disc_radius_validated():
    with pytest.raises(ValueError):
        Disc(0, 0.0)


def test_samples_stay_in_base_and_domain(rng):
    P = unit_interval_pair()
    for dist in ("uniform", "arcsine"):
        s = P.A.sample(rng, 20000, dist)
        assert np.all(P.A.contains(s)) and np.all(P.D.contains(s))
    d = P.D.sample(rng, 20000)
    assert np.all(P.D.contains(d))


def test_arcsine_piles_up_at_endpoints(rng):
    s = BaseSet.interval(-1, 1).sample(rng, 20000, "arcsine").real
    assert np.mean(np.abs(s) > 0.9) > 0.25  # uniform gives 0.1


def test_json_round_trip():
    obj = {"domain": {"kind": "disc", "center": [0.1, 0.0], "radius": 2.0},
           "base": {"kind": "union", "pieces": [{"kind": "interval", "a": -1.0, "b": 1.0},
                                                {"kind": "disc", "center": [0.5, 0.5], "radius": 0.2}]}}
    P = pair_from_json(obj)
    assert pair_from_json(P.to_json()) == P


def test_json_rejects_unknown_keys():
    with pytest.raises(ValueError):
        base_from_json({"kind": "interval", "a": 0, "b": 1, "c": 2})


def test_as_complex_forms():
    assert as_complex([1, 2]) == 1 + 2j
    assert as_complex("0.5j") == 0.5j
    with pytest.raises(ValueError):
        as_complex(float("nan"))


def test_automorphism_requires_inner_point():
    with pytest.raises(UnsupportedMap):
        DiscAutomorphism(0.0, 1.0)


@given(theta=st.floats(-math.pi, math.pi), ar=finite, ai=finite, x=finite, y=finite)
@settings(max_examples=100, deadline=None)
def test_automorphism_preserves_disc_and_inverts(theta, ar, ai, x, y):
    a = complex(ar, ai)
    z = complex(x, y)
    if abs(a) >= 0.95 or abs(z) >= 0.95:
        return
    phi = DiscAutomorphism(theta, a)
    w = phi(z)
    assert abs(w) < 1
    # inverse: rotate back then apply the map with parameter -a e^{i theta}
    inv = DiscAutomorphism(-theta, -a * phi.rotation)
    assert abs(inv(w) - z) < 1e-9


def test_transport_rotation_keeps_diameter():
    P = mobius_transport(unit_interval_pair(), DiscAutomorphism(math.pi / 2))
    assert P.A.contains(0.5j) and not P.A.contains(0.5)


def test_transport_arc_rejected():
    # the interval does not pass through a = 0.5j, so its image is an arc
    with pytest.raises(UnsupportedMap):
        mobius_transport(unit_interval_pair(), DiscAutomorphism(0.0, 0.5j))
