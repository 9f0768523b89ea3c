import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sew.errors import ConfigurationError, DomainError
from sew.harmonics import BlockSelection, evaluate_basis, grid_for
from sew.norms import InducedNorm
from sew.operators import (
    MultiplierSpec,
    SobolevSpec,
    apply_multiplier,
    det_root,
    sample_sobolev_ball,
    sobolev_multiplier,
)
from sew.spectra import ManifoldModel, spectrum

CIRCLE = ManifoldModel("circle")
SPHERE2 = ManifoldModel("sphere", 2)


def zero_mean(model, k_max):
    spec = spectrum(model, k_max)
    return spec, BlockSelection.contiguous(spec, 1, k_max)


def test_identity_multiplier():
    spec, sel = zero_mean(CIRCLE, 4)
    x = np.arange(sel.n, dtype=float)
    assert np.array_equal(apply_multiplier(x, MultiplierSpec.constant(1.0, 5), sel), x)


def test_circle_block3_scaling():
    spec, sel = zero_mean(CIRCLE, 3)
    lam = sobolev_multiplier(SobolevSpec(2.0, 2.0, spec))
    assert lam.values[1:] == pytest.approx((1.0, 0.25, 1 / 9))
    out = apply_multiplier(np.ones(sel.n), lam, sel)
    assert out[sel.block_slice(2)] == pytest.approx([1 / 9, 1 / 9])
    assert lam.tag == "integral:gamma=2"


def test_sphere_half_smoothness():
    spec = spectrum(SPHERE2, 3)
    lam = sobolev_multiplier(SobolevSpec(1.0, 2.0, spec))
    assert lam.values[1] == pytest.approx(2 ** -0.5)
    assert lam.values[2] == pytest.approx(6 ** -0.5)


def test_integral_then_derivative_is_identity():
    spec, sel = zero_mean(SPHERE2, 6)
    s = SobolevSpec(1.7, 2.0, spec)
    x = np.random.default_rng(0).standard_normal(sel.n)
    y = apply_multiplier(apply_multiplier(x, sobolev_multiplier(s), sel), sobolev_multiplier(s, "derivative"), sel)
    assert np.allclose(y, x, rtol=1e-13)


def test_derivative_is_reciprocal():
    spec = spectrum(CIRCLE, 10)
    s = SobolevSpec(2.5, 2.0, spec)
    a = np.array(sobolev_multiplier(s).values[1:])
    b = np.array(sobolev_multiplier(s, "derivative").values[1:])
    assert np.allclose(a * b, 1.0)
    assert sobolev_multiplier(s).values[0] == 0.0


def test_validation():
    spec = spectrum(CIRCLE, 3)
    with pytest.raises(DomainError):
        SobolevSpec(0.0, 2.0, spec)
    with pytest.raises(DomainError):
        SobolevSpec(1.0, 0.5, spec)
    with pytest.raises(ConfigurationError):
        sobolev_multiplier(SobolevSpec(1.0, 2.0, spec), "both")
    with pytest.raises(ConfigurationError):
        MultiplierSpec((1.0, math.inf))
    _, sel = zero_mean(CIRCLE, 3)
    with pytest.raises(ConfigurationError):
        apply_multiplier(np.ones(sel.n + 1), MultiplierSpec.constant(1.0, 4), sel)
    with pytest.raises(ConfigurationError):
        apply_multiplier(np.ones(sel.n), MultiplierSpec.constant(1.0, 2), sel)


def test_invertibility_flag():
    spec, sel = zero_mean(CIRCLE, 3)
    lam = sobolev_multiplier(SobolevSpec(1.0, 2.0, spec))
    assert lam.invertible_on(sel)
    assert not lam.invertible_on(BlockSelection.contiguous(spec, 0, 3))


def test_det_root_examples():
    spec = spectrum(CIRCLE, 2)
    sel = BlockSelection.contiguous(spec, 1, 2)
    lam = sobolev_multiplier(SobolevSpec(2.0, 2.0, spec))
    assert det_root(lam, sel) == pytest.approx(0.5)  # (1 * 1 * 1/4 * 1/4)^{1/4}
    assert det_root(lam, BlockSelection.contiguous(spec, 0, 2)) == 0.0


def test_sampling_zero_mean_and_on_boundary():
    spec, sel = zero_mean(CIRCLE, 6)
    basis = evaluate_basis(CIRCLE, sel, grid_for(sel))
    s = SobolevSpec(2.0, 4.0, spec)
    x = sample_sobolev_ball(s, basis, 300, seed=3)
    psi = apply_multiplier(x, sobolev_multiplier(s, "derivative"), sel)
    assert np.allclose(InducedNorm(basis, 4.0)(psi), 1.0, rtol=1e-12)
    assert x.shape == (300, sel.n)


def test_sampling_p2_scaling():
    spec, sel = zero_mean(SPHERE2, 4)
    basis = evaluate_basis(SPHERE2, sel, grid_for(sel))
    x = sample_sobolev_ball(SobolevSpec(1.0, 2.0, spec), basis, 50, seed=0)
    pre = x * np.sqrt(sel.coordinate_eigenvalues())
    assert np.allclose(np.linalg.norm(pre, axis=1), 1.0)


def test_sampling_deterministic_and_rejects_constants():
    spec, sel = zero_mean(CIRCLE, 4)
    basis = evaluate_basis(CIRCLE, sel, grid_for(sel))
    s = SobolevSpec(1.0, 2.0, spec)
    assert np.array_equal(sample_sobolev_ball(s, basis, 10, 1), sample_sobolev_ball(s, basis, 10, 1))
    full = BlockSelection.contiguous(spec, 0, 4)
    with pytest.raises(ConfigurationError):
        sample_sobolev_ball(s, evaluate_basis(CIRCLE, full, grid_for(full)), 10, 1)


def test_bernstein_containment_on_operators():
    spec, sel = zero_mean(CIRCLE, 12)
    gamma = 2.0
    d = sobolev_multiplier(SobolevSpec(gamma, 2.0, spec), "derivative")
    z = np.random.default_rng(9).standard_normal((1000, sel.n))
    top = spec.theta(12) ** (gamma / 2)
    ratio = np.linalg.norm(apply_multiplier(z, d, sel), axis=1) / (top * np.linalg.norm(z, axis=1))
    assert np.all(ratio <= 1 + 1e-12)
    ztop = np.zeros(sel.n)
    ztop[sel.block_slice(11)] = [0.3, -0.7]
    assert np.linalg.norm(apply_multiplier(ztop, d, sel)) == pytest.approx(top * np.linalg.norm(ztop), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(-5, 5), b=st.floats(-5, 5))
def test_linearity(seed, a, b):
    spec, sel = zero_mean(CIRCLE, 5)
    rng = np.random.default_rng(seed)
    lam = MultiplierSpec(tuple(rng.standard_normal(6)))
    x, y = rng.standard_normal((2, sel.n))
    lhs = apply_multiplier(a * x + b * y, lam, sel)
    rhs = a * apply_multiplier(x, lam, sel) + b * apply_multiplier(y, lam, sel)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(vals=st.lists(st.floats(0.01, 100), min_size=5, max_size=5))
def test_det_root_at_least_min(vals):
    spec, sel = zero_mean(CIRCLE, 4)
    lam = MultiplierSpec((0.0, *vals[:4]))
    r = det_root(lam, sel)
    assert r >= min(vals[:4]) * (1 - 1e-12)
    if len(set(vals[:4])) > 1:
        assert r > min(vals[:4])
