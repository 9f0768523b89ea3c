import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sew.errors import ConfigurationError, DomainError
from sew.harmonics import (
    BlockSelection,
    basis_values,
    build_grid,
    evaluate_basis,
    grid_for,
    kernel,
    kernel_matrix,
    lowest_selection,
    lp_norm,
    nikolskii_bound,
    nikolskii_check,
    normalized_legendre,
    random_points,
    torus_representatives,
)
from sew.spectra import ManifoldModel, spectrum

from oracles import circle_kernel, sphere_kernel

CIRCLE = ManifoldModel("circle")
SPHERE2 = ManifoldModel("sphere", 2)
TORUS2 = ManifoldModel("torus", 2)
TORUS3 = ManifoldModel("torus", 3)


def basis_of(model, blocks, n_max=None):
    spec = spectrum(model, n_max if n_max is not None else max(blocks))
    sel = BlockSelection.from_spectrum(spec, blocks)
    return evaluate_basis(model, sel, grid_for(sel))


def test_circle_grid_example():
    g = build_grid(CIRCLE, 3)
    assert g.size == 13
    assert np.allclose(g.weights, 1 / 13)


@pytest.mark.parametrize("model,deg", [(CIRCLE, 0), (CIRCLE, 7), (SPHERE2, 5), (TORUS2, 3), (TORUS3, 2)])
def test_weights_positive_and_normalized(model, deg):
    g = build_grid(model, deg)
    assert np.all(g.weights > 0)
    assert abs(g.weights.sum() - 1) < 1e-14


@pytest.mark.parametrize("model,blocks", [
    (CIRCLE, range(0, 9)),
    (SPHERE2, range(0, 3)),
    (SPHERE2, range(0, 13)),
    (TORUS2, range(0, 8)),
    (TORUS3, range(0, 5)),
])
def test_gram_identity(model, blocks):
    b = basis_of(model, list(blocks))
    assert np.abs(b.gram() - np.eye(b.n)).max() < 1e-12


def test_high_degree_sphere_block_is_orthonormal():
    b = basis_of(SPHERE2, [60])
    assert np.abs(b.gram() - np.eye(b.n)).max() < 1e-10


def test_circle_basis_at_zero():
    spec = spectrum(CIRCLE, 1)
    v = basis_values(BlockSelection.from_spectrum(spec, [1]), [[0.0]])
    assert np.allclose(v[:, 0], [math.sqrt(2), 0.0])


def test_sphere_block1_addition():
    rng = np.random.default_rng(2)
    pts = random_points(SPHERE2, 50, rng)
    v = basis_values(BlockSelection.from_spectrum(spectrum(SPHERE2, 1), [1]), pts)
    assert np.allclose((v ** 2).sum(axis=0), 3.0, rtol=1e-13)


def test_sphere_addition_up_to_degree_20():
    rng = np.random.default_rng(0)
    pts = random_points(SPHERE2, 200, rng)
    spec = spectrum(SPHERE2, 20)
    for k in range(21):
        v = basis_values(BlockSelection.from_spectrum(spec, [k]), pts)
        assert np.abs((v ** 2).sum(axis=0) / (2 * k + 1) - 1).max() <= 1e-8


def test_legendre_normalization_and_stability():
    x, w = np.polynomial.legendre.leggauss(400)
    table = normalized_legendre([0, 5, 150, 300], x)
    for (l, m), vals in table.items():
        assert 0.5 * np.dot(w, vals ** 2) == pytest.approx(1.0, abs=1e-10), (l, m)
    assert all(np.all(np.isfinite(v)) for v in table.values())


def test_torus_representatives_one_per_pair():
    reps = torus_representatives(2, [1, 5])
    assert reps[1].tolist() == [[0, 1], [1, 0]]
    assert len(reps[5]) == 4


def test_circle_kernel_matches_dirichlet_oracle():
    b = basis_of(CIRCLE, [0, 1, 2])
    rng = np.random.default_rng(1)
    x, y = random_points(CIRCLE, 7, rng), random_points(CIRCLE, 5, rng)
    assert np.allclose(kernel_matrix(b, x, y), circle_kernel([0, 1, 2], x, y), atol=1e-12)
    assert np.allclose(np.diag(kernel_matrix(b, x, x)), 5.0)


def test_sphere_kernel_matches_legendre_oracle():
    blocks = [0, 2, 3, 7]
    b = basis_of(SPHERE2, blocks)
    rng = np.random.default_rng(3)
    x, y = random_points(SPHERE2, 6, rng), random_points(SPHERE2, 4, rng)
    assert np.allclose(kernel_matrix(b, x, y), sphere_kernel(blocks, x, y), atol=1e-11)


@pytest.mark.parametrize("model,blocks", [(CIRCLE, [0, 3, 5]), (SPHERE2, [1, 4]), (TORUS2, [0, 2, 3]), (TORUS3, [1, 2])])
def test_kernel_diagonal_symmetry_and_reproduction(model, blocks):
    b = basis_of(model, blocks)
    rng = np.random.default_rng(4)
    x, y = random_points(model, 5, rng), random_points(model, 5, rng)
    assert np.allclose(np.diag(kernel_matrix(b, x, x)), b.n, rtol=1e-10)
    assert kernel(b, x[:1], y[:1]) == pytest.approx(kernel(b, y[:1], x[:1]), abs=1e-12)
    kxz = b.at(x).T @ b.table
    kzy = b.table.T @ b.at(y)
    assert np.allclose((kxz * b.grid.weights) @ kzy, kernel_matrix(b, x, y), atol=1e-8)


def test_kernel_sup_attained_on_diagonal():
    b = basis_of(SPHERE2, [0, 1, 2, 3])
    k = b.table.T @ b.table[:, ::17]
    assert np.abs(k).max() <= b.n * (1 + 1e-12)


def test_lp_norm_examples():
    g = build_grid(CIRCLE, 16)
    x = g.points[:, 0]
    assert lp_norm(np.ones(g.size), g, 7.3) == pytest.approx(1.0)
    f = math.sqrt(2) * np.cos(x)
    assert lp_norm(f, g, 2) == pytest.approx(1.0, abs=1e-13)
    assert lp_norm(f, g, math.inf) == pytest.approx(math.sqrt(2), abs=1e-13)
    assert lp_norm(f, g, 1) == pytest.approx(2 * math.sqrt(2) / math.pi, abs=2e-3)


def test_lp_norm_errors():
    g = build_grid(CIRCLE, 2)
    with pytest.raises(DomainError):
        lp_norm(np.ones(g.size), g, 0.5)
    with pytest.raises(DomainError):
        lp_norm(np.ones(g.size + 1), g, 2)


def test_sup_norm_refinement_is_stable():
    rng = np.random.default_rng(5)
    c = rng.standard_normal(33)
    spec = spectrum(CIRCLE, 16)
    sel = BlockSelection.contiguous(spec, 0, 16)
    coarse = lp_norm(c @ basis_values(sel, build_grid(CIRCLE, 16).points), build_grid(CIRCLE, 16), math.inf)
    fine_grid = build_grid(CIRCLE, 16, oversample=16)
    fine = lp_norm(c @ basis_values(sel, fine_grid.points), fine_grid, math.inf)
    assert coarse <= fine + 1e-12
    assert (fine - coarse) / fine < 1e-1


def test_large_p_does_not_overflow():
    g = build_grid(CIRCLE, 4)
    v = 1e200 * np.ones(g.size)
    assert lp_norm(v, g, 50) == pytest.approx(1e200)


def test_nikolskii_extremal_kernel_section():
    b = basis_of(CIRCLE, range(0, 6))
    ratio, bound = nikolskii_check(b.at(b.grid.points[:1])[:, 0], b, math.inf, 2)
    assert ratio == pytest.approx(math.sqrt(b.n), rel=1e-10)
    assert bound == pytest.approx(math.sqrt(b.n))


def test_nikolskii_random_polynomials():
    b = basis_of(SPHERE2, [0, 1, 2, 3])
    rng = np.random.default_rng(6)
    c = rng.standard_normal((1000, b.n))
    for p in (1, 2, math.inf):
        for q in (1, 2, math.inf):
            vals = b.synthesize(c)
            ratio = lp_norm(vals, b.grid, p) / lp_norm(vals, b.grid, q)
            assert np.all(ratio <= nikolskii_bound(b.n, p, q) * (1 + 1e-10)), (p, q)


def test_nikolskii_zero_vector():
    b = basis_of(CIRCLE, [1])
    with pytest.raises(DomainError):
        nikolskii_check(np.zeros(2), b, 2, 2)


def test_evaluate_basis_checks_exactness():
    spec = spectrum(CIRCLE, 5)
    sel = BlockSelection.contiguous(spec, 0, 5)
    with pytest.raises(DomainError):
        evaluate_basis(CIRCLE, sel, build_grid(CIRCLE, 2))
    with pytest.raises(ConfigurationError):
        evaluate_basis(SPHERE2, sel, build_grid(CIRCLE, 5))


def test_selection_validation():
    spec = spectrum(CIRCLE, 4)
    with pytest.raises(ConfigurationError):
        BlockSelection.from_spectrum(spec, [2, 1])
    with pytest.raises(ConfigurationError):
        BlockSelection.from_spectrum(spec, [])
    sel = BlockSelection.from_spectrum(spec, [0, 2, 4])
    assert sel.offsets == (0, 1, 3, 5)
    assert sel.block_slice(1) == slice(1, 3)
    assert sel.coordinate_blocks().tolist() == [0, 2, 2, 4, 4]


def test_lowest_selection():
    spec = spectrum(CIRCLE, 10)
    assert lowest_selection(spec, 4).blocks == (1, 2)
    assert lowest_selection(spec, 5).blocks == (0, 1, 2)
    with pytest.raises(ConfigurationError):
        lowest_selection(spectrum(SPHERE2, 5), 5)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.floats(1, 20), dq=st.floats(0, 20))
def test_lp_norm_nondecreasing_in_p(seed, p, dq):
    b = basis_of(CIRCLE, [1, 2, 3])
    c = np.random.default_rng(seed).standard_normal(b.n)
    vals = b.synthesize(c)
    assert lp_norm(vals, b.grid, p) <= lp_norm(vals, b.grid, p + dq) * (1 + 1e-12)
