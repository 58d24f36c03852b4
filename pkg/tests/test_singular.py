import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nkcross.cross import CrossSpec, in_center
from nkcross.errors import DimensionMismatch, UnsupportedSigmaKind
from nkcross.geometry import unit_interval_pair
from nkcross.scene import SIGMA_POINTS
from nkcross.singular import (Polynomial, SingularSet, delta_sets, fiber, is_pluripolar, linear_form,
                              singular_from_json, tensor_from_json)

P = unit_interval_pair()
small = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def test_polynomial_evaluation():
    # 1 + 2 z0 z2^2 over vars (0, 2)
    c = np.zeros((2, 3), dtype=complex)
    c[0, 0] = 1
    c[1, 2] = 2
    p = Polynomial(c, (0, 2))
    z = np.array([0.5, 9.0, 1j])
    assert p.evaluate_full(z) == pytest.approx(1 + 2 * 0.5 * (1j) ** 2)
    assert p.degree == 3
    with pytest.raises(DimensionMismatch):
        Polynomial(c, (0,))


@given(a=small, b=small, x=small, y=small)
@settings(max_examples=200, deadline=None)
def test_substitute_matches_evaluation(a, b, x, y):
    p = linear_form({0: a, 1: b}, 0.5)
    q = p.substitute({0: x})
    assert q.vars == (1,)
    assert abs(q([y]) - p([x, y])) <= 1e-9 * (1 + abs(a * x) + abs(b * y))


def test_zero_and_unit_detection():
    p = linear_form({0: 1.0, 1: 1.0}, -0.5)
    assert p.substitute({0: 0.5, 1: 0.0}).is_zero()
    assert p.substitute({0: 0.25, 1: 0.0}).is_unit()
    assert not p.is_zero() and not p.is_unit()


def test_point_sets():
    s = SingularSet.from_points((0, 2), [[0.1, 0.2], [0.1, 0.2], [0.3, 0.4]])
    assert len(s.points) == 2
    assert s.contains([0.1, 0.2]) and not s.contains([0.2, 0.1])
    assert np.array_equal(s.contains(np.array([[0.1, 0.2], [0.0, 0.0]])), [True, False])
    with pytest.raises(DimensionMismatch):
        s.contains([0.1])


def test_zero_dimensional_point_set():
    s = SingularSet.from_points((), np.zeros((1, 0)))
    assert s.kind == "points"
    assert s.contains(np.zeros(0))


def test_polyzero_membership_is_relative():
    s = SingularSet.zero_set((0, 1), linear_form({0: 1.0, 1: 1.0}, -0.5))
    assert s.contains([0.2, 0.3])
    assert not s.contains([0.2, 0.3 + 1e-9])
    with pytest.raises(ValueError):
        SingularSet.zero_set((0,), Polynomial(np.zeros(2), (0,)))


def test_fibers():
    m = SingularSet.zero_set((0, 1, 2), linear_form({0: 1.0, 1: 1.0}, -0.5))
    f = fiber(m, [0.25], (0, 1, 1))
    assert f.coords == (1, 2) and f.contains([0.25, 0.9]) and not f.contains([0.3, 0.9])
    assert fiber(m, [0.25, 0.25], (0, 0, 1)).kind == "full"
    assert fiber(m, [0.25, 0.0], (0, 0, 1)).kind == "empty"
    assert not is_pluripolar(fiber(m, [0.25, 0.25], (0, 0, 1)))
    pts = SingularSet.from_points((0, 1, 2), [[0.1, 0.2, 0.3]])
    assert fiber(pts, [0.1], (0, 1, 1)).contains([0.2, 0.3])
    assert fiber(pts, [0.2], (0, 1, 1)).kind == "empty"
    with pytest.raises(DimensionMismatch):
        fiber(pts, [0.1, 0.2], (0, 1, 1))


def test_json_round_trip():
    obj = {"kind": "polyzero", "vars": [0, 1], "coeffs": [[[-0.5, 0], [1, 0]], [[1, 0], [0, 0]]]}
    s = singular_from_json(obj, (0, 1, 2))
    assert s.contains([0.25, 0.25, 0.9])
    again = singular_from_json(s.to_json(), (0, 1, 2))
    assert np.array_equal(again.poly.coeffs, s.poly.coeffs)
    assert tensor_from_json([[1, 0], [0, 1]], 1).tolist() == [1, 1j]
    with pytest.raises(UnsupportedSigmaKind):
        singular_from_json({"kind": "analytic"}, (0,))


def test_delta_sets_of_the_example(t_scene, y_scene):
    s1, s2, s3 = SIGMA_POINTS
    d_I, _ = delta_sets(t_scene.spec)
    _, d_J = delta_sets(y_scene.spec)
    assert d_I.rows == ((complex(s1), complex(s2), complex(s3)),)
    assert d_J.is_empty  # weight-1 sigmas are empty
    # centers: T loses the Δ point, Y keeps it
    a = [s1, s2, s3]
    assert not in_center(t_scene.spec, a)
    assert in_center(y_scene.spec, a)


def test_delta_free_coordinates():
    # only one weight-2 sigma is nonempty: the other constraints are empty, so Δ is empty
    spec = CrossSpec((P,) * 3, 2, "T", {(1, 1, 0): SingularSet.from_points((2,), [0.5])})
    d_I, d_J = delta_sets(spec)
    assert d_I.is_empty and d_J.is_empty
    # with k = N every sigma lives over no coordinates; a nonempty one makes Δ everything
    full = CrossSpec((P,) * 2, 2, "T", {(1, 1): SingularSet.from_points((), np.zeros((1, 0)))})
    d_I, _ = delta_sets(full)
    assert d_I.rows == ((None, None),)
    assert d_I.contains([0.3, -0.2])
