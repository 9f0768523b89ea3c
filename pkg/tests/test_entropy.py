import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sew.entropy import (
    BoundReport,
    CoveringReport,
    body_samples,
    carl_transfer,
    check_sandwich,
    doubling_constant,
    empirical_covering,
    entropy_lower_bound,
    farthest_point_radii,
    hit_or_miss_ratio,
    lower_factor,
    sobolev_entropy_lower,
    sobolev_entropy_upper,
    upper_factor,
    volume_ratio,
)
from sew.errors import CapabilityError, DomainError, HypothesisViolation
from sew.harmonics import evaluate_basis, grid_for, lowest_selection
from sew.norms import EuclideanNorm, InducedNorm
from sew.spectra import ManifoldModel, spectrum

from oracles import polar_area_ratio

CIRCLE = ManifoldModel("circle")


def circle_norm(n, p):
    spec = spectrum(CIRCLE, n)
    sel = lowest_selection(spec, n)
    return InducedNorm(evaluate_basis(CIRCLE, sel, grid_for(sel)), p)


def euclid(x):
    return np.linalg.norm(x, axis=-1)


def test_lower_bound_formula_examples():
    assert entropy_lower_bound(1, 1, 1, 3, 3) == pytest.approx(0.25)
    assert entropy_lower_bound(1, 1, 1, 6, 3) == pytest.approx(0.125)
    assert entropy_lower_bound(0.5, 1, 1, 2, 2) == pytest.approx(0.125)
    with pytest.raises(DomainError):
        entropy_lower_bound(0, 1, 1, 1, 1)


def test_sobolev_lower_example():
    assert sobolev_entropy_lower(16, 2, 1, 2, 2) == pytest.approx(2.762e-3, rel=1e-3)


def test_sobolev_upper_follows_case_table():
    # (q/(p-1))^{1/2} = sqrt(2) at p = q = 2
    assert sobolev_entropy_upper(16, 2, 1, 2, 2) == pytest.approx(math.sqrt(2) / 256)
    n = 50
    assert upper_factor(n, 1, math.inf) == pytest.approx(math.log(n))
    assert upper_factor(n, 1, 4) == pytest.approx(math.sqrt(4 * math.log(n)))
    assert upper_factor(n, 1.5, math.inf) == pytest.approx(math.sqrt(math.log(n) / 0.5))


def test_lower_factor_cases():
    n = 100
    assert lower_factor(n, math.inf, 1) == pytest.approx(1 / math.log(n))
    assert lower_factor(n, 3, 1) == pytest.approx((3 * math.log(n)) ** -0.5)
    assert lower_factor(n, math.inf, 3) == pytest.approx((math.log(n) / 2) ** -0.5)
    assert lower_factor(n, 3, 5) == pytest.approx((3 / 4) ** -0.5)
    assert lower_factor(n, 3, math.inf) == pytest.approx(3 ** -0.5)


def test_doubling_n_scales_exactly():
    for n in (3, 10, 77):
        a = sobolev_entropy_lower(n, 3.0, 2, 2.5, 1.5)
        b = sobolev_entropy_lower(2 * n, 3.0, 2, 2.5, 1.5)
        assert b / a == pytest.approx(2 ** -1.5, rel=1e-13)


def test_hypotheses_and_domains():
    with pytest.raises(HypothesisViolation):
        sobolev_entropy_upper(10, 1.0, 1, 2, 2)
    with pytest.raises(HypothesisViolation):
        sobolev_entropy_upper(10, 3.0, 1, 3, 4)
    with pytest.raises(HypothesisViolation):
        sobolev_entropy_upper(10, 3.0, 1, 2, 1.5)
    with pytest.raises(DomainError):
        sobolev_entropy_lower(1, 2, 1, 2, 2)
    with pytest.raises(DomainError):
        sobolev_entropy_lower(4, 2, 1, 0.5, 2)


def test_volume_ratio_euclidean_is_one():
    for n in (2, 4, 6):
        est = volume_ratio(circle_norm(n, 2), 5000, 0)
        assert abs(est.mean - 1) <= 3 * est.stderr + 1e-12


def test_volume_ratio_matches_polar_area():
    nm = circle_norm(3, 4)  # blocks {0, 1}: not rotation invariant
    # two-dimensional slice is not what we want; use an n = 2 body built from blocks {1} of T^1 x weights
    nm2 = circle_norm(2, 4)
    assert volume_ratio(nm2, 2000, 0).mean == pytest.approx(polar_area_ratio(nm2), rel=1e-10)
    est = volume_ratio(nm, 200_000, 0)
    hm = hit_or_miss_ratio(nm, 200_000, 1)
    assert est.mean == pytest.approx(hm.mean, rel=0.02)


def test_volume_ratio_jensen_direction():
    for n in (2, 3, 4):
        nm = circle_norm(n, 4)
        from sew.norms import levy_mean

        m = levy_mean(nm, 20_000, 0)
        v = volume_ratio(nm, 20_000, 0)
        assert v.mean >= 1 / m.mean - 3 * (v.stderr + m.stderr / m.mean ** 2) - 1e-12


def test_volume_ratio_capability():
    with pytest.raises(CapabilityError):
        volume_ratio(EuclideanNorm(9), 1000, 0)


def test_interval_covering_within_factor_two():
    pts = np.linspace(-1, 1, 4001)[:, None]
    for k in range(1, 9):
        upper, lower = empirical_covering(pts, euclid, k)
        truth = 2.0 ** (1 - k)
        assert lower.radius <= truth + 1e-12 <= upper.radius + 2e-12
        assert upper.radius <= 2 * truth + 1e-3
        check_sandwich(upper, lower)


def test_unit_ball_k1():
    pts = body_samples(EuclideanNorm(2), 20_000, 0)
    upper, lower = empirical_covering(pts, euclid, 1)
    assert upper.radius == pytest.approx(1.0, abs=1e-3)
    assert upper.centers == 1 and lower.centers == 2


def test_covering_nonincreasing_in_k():
    pts = body_samples(EuclideanNorm(3), 5000, 0, linear=[1, 0.5, 0.25])
    r = [empirical_covering(pts, euclid, k)[0].radius for k in range(1, 10)]
    assert all(b <= a for a, b in zip(r, r[1:]))


def test_covering_limits():
    pts = np.zeros((10, 7))
    with pytest.raises(CapabilityError):
        empirical_covering(pts, euclid, 2)
    with pytest.raises(CapabilityError):
        empirical_covering(np.zeros((10, 2)), euclid, 20, budget=1024)


def test_farthest_point_radii_monotone():
    pts = np.random.default_rng(0).uniform(-1, 1, size=(500, 2))
    r = farthest_point_radii(pts, euclid, 30)
    assert np.all(np.diff(r[1:]) <= 0)


def test_body_samples_inside_ball():
    nm = circle_norm(3, 4)
    pts = body_samples(nm, 3000, 2)
    assert np.all(nm(pts) <= 1 + 1e-12)


def test_sandwich_detects_violation():
    with pytest.raises(AssertionError):
        check_sandwich(CoveringReport(0.1, 4, "upper"), CoveringReport(0.2, 5, "lower"))


def test_carl_power_sequence():
    l = np.arange(1, 200)
    reps = carl_transfer(l ** -1.5, 1.5)
    assert [r.value for r in reps] == pytest.approx((l ** -1.5).tolist())
    assert reps[0].kind == "upper-carl" and reps[0].metadata["constant"] == 1


def test_carl_dominates_width():
    w = np.sort(np.random.default_rng(0).uniform(0, 1, 100))[::-1]
    vals = np.array([r.value for r in carl_transfer(w, 2.0, "inverse-sqrt-log")])
    assert np.all(vals >= w - 1e-15)


def test_carl_rejects_increasing():
    with pytest.raises(DomainError):
        carl_transfer([0.1, 0.2], 1.0)
    with pytest.raises(DomainError):
        carl_transfer([0.3, 0.2], 1.0, "cubic")


def test_doubling_constant_example():
    c = doubling_constant(2.0, "inverse-sqrt-log")
    assert c <= 4.0
    assert doubling_constant(2.0) == pytest.approx(4.0)


def test_bound_report_validation():
    with pytest.raises(DomainError):
        BoundReport("upper-carl", 1, -1.0)
    with pytest.raises(DomainError):
        BoundReport("guess", 1, 1.0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 4096), gamma=st.floats(1.01, 6), p=st.floats(1.01, 2), q=st.floats(2, 50))
def test_lower_below_upper(n, gamma, p, q):
    assert sobolev_entropy_lower(n, gamma, 1, p, q) <= sobolev_entropy_upper(n, gamma, 1, p, q)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(2, 10_000), p=st.floats(1.01, 2), q=st.floats(2, 50))
def test_order_matching_ratio_constant(n, p, q):
    r1 = sobolev_entropy_upper(n, 2, 1, p, q) / sobolev_entropy_lower(n, 2, 1, p, q)
    r2 = sobolev_entropy_upper(2 * n, 2, 1, p, q) / sobolev_entropy_lower(2 * n, 2, 1, p, q)
    assert r1 == pytest.approx(r2, rel=1e-12)
