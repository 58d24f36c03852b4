import numpy as np
import pytest

from nkcross.cross import CrossSpec, cross_mask
from nkcross.errors import DenominatorVanishesIdentically, InsufficientSamples, UndefinedValue
from nkcross.extend import (SampledFunction, blowup_check, certify_no_zeros, check_sep_holo, compare_on_hull,
                            exponents, extend_poly, extend_rational, fit_samples, make_function, sample_mhat)
from nkcross.geometry import unit_interval_pair
from nkcross.hull import hull_mask, sample_hull, shrink_toward_center
from nkcross.singular import Polynomial, linear_form

P = unit_interval_pair()
X2 = CrossSpec((P,) * 2, 1, "X")


def test_exponents():
    assert len(exponents((2, 2, 2))) == 27
    ms = exponents((4, 4), total_degree=4)
    assert len(ms) == 15 and ms.sum(axis=1).max() == 4


def test_fit_samples_on_cross(x32, rng):
    Z = fit_samples(x32, 500, rng)
    assert np.all(cross_mask(x32, Z))


def test_poly222_recovered(x32):
    tf = make_function("poly222", x32)
    ext = extend_poly(tf.func, (2, 2, 2), seed=3)
    assert np.max(np.abs(ext.raw_coefficients() - tf.coeffs)) <= 1e-8
    H = sample_hull(x32, 200, 4)
    assert compare_on_hull(ext, tf.func, H)["max_abs"] <= 1e-8


def test_zero_function(x32):
    ext = extend_poly(make_function("zero", x32).func, (1, 1, 1))
    assert np.all(ext.raw_coefficients() == 0)


def test_geometric_series_small_degree():
    # 1 / (2 - z1 - z2) on a cross of order 1: modest degree already fits well inside
    f = make_function("geom", X2).func
    ext = extend_poly(f, (16, 16), total_degree=16, seed=1)
    H = shrink_toward_center(X2, sample_hull(X2, 300, 2), 0.5)
    assert compare_on_hull(ext, f, H)["max_rel"] <= 1e-3


def test_uniqueness_across_seeds(x32):
    f = make_function("exp", x32).func
    a = extend_poly(f, (6, 6, 6), total_degree=10, seed=1)
    b = extend_poly(f, (6, 6, 6), total_degree=10, seed=2)
    H = shrink_toward_center(x32, sample_hull(x32, 300, 5), 0.8)
    assert np.max(np.abs(a(H) - b(H))) <= 1e-6


def test_budget_checked(x32):
    with pytest.raises(InsufficientSamples):
        extend_poly(make_function("poly", x32).func, (2, 2, 2), budget=20)


def test_undefined_values_raise(x32):
    f = SampledFunction(lambda Z: np.where(Z[:, 0].real > 0.5, np.nan, 1.0) + 0j, x32)
    with pytest.raises(UndefinedValue):
        extend_poly(f, (1, 1, 1))


def test_polynomial_extension_rejects_singular_functions(x32):
    with pytest.raises(ValueError):
        extend_poly(make_function("rational:c=0.5", x32).func, (1, 1, 1))


def test_rational_extension(x32):
    tf = make_function("rational:c=0.5", x32)
    ext = extend_rational(tf.func, tf.denominator, (1, 1, 1), seed=2)
    assert np.max(np.abs(ext.numerator.raw_coefficients() - tf.numerator)) <= 1e-6
    assert not ext.mhat.empty_certified
    assert len(ext.mhat.points) > 0 and ext.mhat.consistent
    assert np.all(np.abs(tf.denominator.evaluate_full(ext.mhat.points)) <= 1e-10)
    assert np.all(hull_mask(x32, ext.mhat.points))
    blow = blowup_check(ext, offset=1e-8, threshold=1e6)
    assert blow["passed"] and blow["min_abs"] >= 1e6


def test_rational_without_zeros_is_certified(x32):
    tf = make_function("rational:c=3", x32)
    ext = extend_rational(tf.func, tf.denominator, (3, 3, 1), total_degree=6, seed=2)
    assert ext.mhat.empty_certified and len(ext.mhat.points) == 0
    assert certify_no_zeros(tf.denominator, x32)


def test_zero_denominator_rejected(x32):
    tf = make_function("rational:c=0.5", x32)
    with pytest.raises(DenominatorVanishesIdentically):
        extend_rational(tf.func, Polynomial(np.zeros((2, 2)), (0, 1)), (1, 1, 1))


def test_sample_mhat_points_lie_on_zero_set(x32, rng):
    p = linear_form({0: 1.0, 1: 1.0, 2: 1.0}, -1.0)
    pts = sample_mhat(p, x32, 40, rng)
    assert len(pts) == 40
    assert np.allclose(pts.sum(axis=1), 1.0)


@pytest.mark.parametrize("name", ["poly", "poly222", "rational:c=0.5", "pole:w0=0.3"])
def test_sep_holo_accepts_holomorphic(x32, name):
    rep = check_sep_holo(make_function(name, x32).func, seed=1)
    assert rep.passed, rep.to_json()


def test_sep_holo_rejects_conjugate(x32):
    rep = check_sep_holo(make_function("conj", x32).func, seed=1)
    assert not rep.passed
    assert max(a["max_residual"] for a in rep.per_alpha.values()) >= 0.1


def test_registry(x32):
    with pytest.raises(ValueError):
        make_function("sin", x32)
    with pytest.raises(ValueError):
        make_function("poly", X2)
    f = make_function("pole:w0=0.3", x32).func
    assert np.isnan(f(np.array([[0.1, 0.3, 0.2]]))[0])
