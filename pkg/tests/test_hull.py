import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_example_values, h_unit_interval
from nkcross.checks import worked_example
from nkcross.cross import CrossSpec, sample_cross
from nkcross.errors import BadOrder, NotInHull, OutsideAmbient, UnsupportedComposite
from nkcross.geometry import UNIT_DISC, BaseSet, make_pair, unit_interval_pair
from nkcross.hull import (CompositeHull2, HullQuery, composite_formula, composite_hull2_value, composite_mask,
                          factor_values, hull_mask, hull_value, in_hull, lemma_formula, lemma_inc_value,
                          sample_hull, shrink_toward_center, slice_grid, submean_defect)

P = unit_interval_pair()
W = 1j / math.sqrt(3)
unit = st.floats(0, 1, allow_nan=False)


def test_hull_value_matches_oracle(x32, rng):
    Z = 0.95 * (rng.uniform(-1, 1, (500, 3)) + 1j * rng.uniform(-1, 1, (500, 3))) / math.sqrt(2)
    assert np.allclose(hull_value(x32, Z, "closed"), h_unit_interval(Z).sum(axis=1), atol=1e-12)


def test_worked_example_exact():
    ref = exact_example_values()
    outcomes, payload = worked_example()
    assert all(o.passed for o in outcomes), [o for o in outcomes if not o.passed]
    assert payload["hull_value_exact"] == ref["hull"] == Fraction(4, 3)
    assert payload["zs_value_exact"] == ref["composite"]
    assert abs(payload["hull_value"] - 4 / 3) <= 1e-12


def test_worked_example_other_points():
    # w = 0 lies in the center: in the composite hull too, so the third check fails
    outcomes, _ = worked_example(0)
    assert [o.passed for o in outcomes] == [True, True, False]
    outcomes, payload = worked_example(0.9j)
    assert payload["exact"] is False
    assert outcomes[0].passed


def test_in_hull_decisions(x32):
    assert in_hull(x32, [0, W, W], "closed") is True
    assert in_hull(x32, [0.9j, 0.9j, 0.9j], "closed") is False
    with pytest.raises(OutsideAmbient):
        in_hull(x32, [0, 1.2, 0])


def test_field_strategy_has_indeterminate_band(x32):
    # each coordinate contributes 2/3, so the value is 2 = k up to rounding
    z = np.array([W, W, W])
    assert abs(hull_value(x32, z, "closed") - 2.0) < 1e-12
    q = HullQuery(x32, "field", margin=0.05)
    assert q.decide(z) is None
    with pytest.raises(ValueError):
        HullQuery(x32, "closed", margin=1.5)


def test_cross_in_hull_and_hull_monotone(rng):
    for N in (3, 4):
        X = CrossSpec((P,) * N, 2, "X")
        assert np.all(hull_mask(X, sample_cross(X, 3000, rng)))
        for k in range(1, N):
            H = sample_hull(X.with_(k=k), 2000, k)
            assert np.all(hull_mask(X, H, k=k + 1))


@given(vals=st.lists(unit, min_size=2, max_size=6), k=st.integers(2, 6))
@settings(max_examples=300, deadline=None)
def test_lemma_formula_properties(vals, k):
    v = np.array(vals)
    f = float(lemma_formula(v, k))
    assert f >= 0
    if v.sum() <= k - 1:
        assert f == 0
    if v.sum() < k:
        assert f < 1
    assert f == pytest.approx(max(0.0, v.sum() - k + 1))


def test_lemma_formula_fractions():
    assert lemma_formula([Fraction(2, 3), Fraction(2, 3), Fraction(1, 3)], 2) == Fraction(2, 3)
    assert lemma_formula([Fraction(0), Fraction(1, 3)], 2) == 0


def test_lemma_inc_value(x32):
    assert lemma_inc_value(x32, [0, W, W], strategy="closed") == pytest.approx(1 / 3)
    with pytest.raises(NotInHull):
        lemma_inc_value(x32, [0.9j, 0.9j, 0.9j], strategy="closed")
    with pytest.raises(BadOrder):
        lemma_inc_value(x32.with_(k=1), [0, 0, 0])


def test_lemma_formula_is_subharmonic_on_lines(x32, rng):
    H = sample_hull(x32, 200, 3, "closed")
    H = H[np.all(np.abs(H) < 0.99, axis=1)]

    def func(Z):
        return lemma_formula(factor_values(x32, Z, "closed"), 2)

    for z in H:
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert submean_defect(func, z, v, 1e-3) >= -1e-6


def test_submean_detects_superharmonic():
    def concave(Z):
        return -np.abs(Z[:, 0]) ** 2

    assert submean_defect(concave, np.array([0.1 + 0j]), np.array([1.0 + 0j]), 0.1) < -1e-3


def test_composite_restrictions(x32):
    with pytest.raises(UnsupportedComposite):
        CompositeHull2(CrossSpec((P,) * 4, 2, "X"), "Zs")
    with pytest.raises(BadOrder):
        CompositeHull2(x32.with_(k=1), "Z")
    with pytest.raises(BadOrder):
        CompositeHull2(x32.with_(k=3), "Z")
    with pytest.raises(ValueError):
        CompositeHull2(x32, "Z", factor=3)


def test_composite_values(x32):
    zs = CompositeHull2(x32, "Zs", factor=2)
    assert composite_hull2_value(zs, [0, W, W], "closed") == pytest.approx(4 / 3)
    z = CompositeHull2(x32, "Z", factor=2)
    assert composite_hull2_value(z, [0, W, W], "closed") == pytest.approx(2 / 3)
    assert composite_formula([Fraction(0), Fraction(2, 3), Fraction(2, 3)], 2, "Zs", 2) == Fraction(4, 3)


@pytest.mark.parametrize("N", [3, 4])
def test_composite_z_agrees_with_hull(N, rng):
    X = CrossSpec((P,) * N, 2, "X")
    for k in range(2, N):
        S = X.with_(k=k)
        for factor in range(N):
            c = CompositeHull2(S, "Z", factor=factor)
            H = sample_hull(S, 2000, 10 + k)
            Z = np.concatenate([H, 0.98 * sample_hull(S.with_(k=N), 500, 20 + k)])
            h = hull_value(S, Z)
            keep = np.abs(h - k) > 1e-9
            assert np.array_equal(composite_mask(c, Z)[keep], (h < k)[keep])


def test_zs_is_smaller_than_hull(x32):
    # the point of the worked example: in the hull but outside the Zs composite
    c = CompositeHull2(x32, "Zs")
    H = sample_hull(x32, 2000, 5, "closed")
    assert np.all(composite_mask(c, H, "closed") <= hull_mask(x32, H, "closed"))
    assert not composite_mask(c, np.array([[0, W, W]]), "closed")[0]


def test_sample_hull_seeded(x32):
    a = sample_hull(x32, 100, 9)
    assert np.array_equal(a, sample_hull(x32, 100, 9))
    assert np.all(hull_mask(x32, a))
    with pytest.raises(ValueError):
        sample_hull(x32, 0, 1)


def test_shrink(x32):
    Z = np.array([[0.5, 0.5j, -0.5]])
    assert np.allclose(shrink_toward_center(x32, Z, 0.8), 0.8 * Z)


def test_slice_grid_and_csv(tmp_path, x32):
    s = slice_grid(x32, 2, [0, W], 21)
    assert s.values.shape == (21, 21)
    centre = s.values[10, 10]
    assert centre == pytest.approx(2 / 3)
    path = tmp_path / "slice.csv"
    s.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "re,im,value"
    assert len(lines) - 1 == int(np.isfinite(s.values).sum())
    with pytest.raises(ValueError):
        slice_grid(x32, 0, [0], 21)


def test_field_strategy_on_non_catalog_factor():
    Q = make_pair(BaseSet.subdisc(0.3, 0.2), UNIT_DISC)
    spec = CrossSpec((P, Q), 1, "X")
    v = hull_value(spec, [0.5j, 0.3], "auto")
    assert v == pytest.approx(float(h_unit_interval(0.5j)), abs=1e-12)
