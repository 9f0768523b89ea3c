"""
Real orthonormal harmonic bases, product quadrature, reproducing kernels and
discrete L_p norms.

Points are stored as ``(P, c)`` float arrays: one angle for the circle, ``d``
angles for the torus, ``(colatitude, azimuth)`` for the 2-sphere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import roots_legendre

from .errors import ConfigurationError, DomainError
from .spectra import ManifoldModel, Spectrum

__all__ = [
    "OVERSAMPLE",
    "BlockSelection",
    "QuadratureGrid",
    "BasisSlice",
    "block_degree",
    "build_grid",
    "grid_for",
    "basis_values",
    "evaluate_basis",
    "normalized_legendre",
    "torus_representatives",
    "kernel",
    "kernel_matrix",
    "lp_norm",
    "lowest_selection",
    "nikolskii_bound",
    "nikolskii_check",
    "random_points",
]

#: Quadrature exactness is ``OVERSAMPLE * max_degree``; 2 would suffice for
#: Gram matrices, the extra factor keeps |f|^p (p not even) well resolved.
OVERSAMPLE = 4


def block_degree(model: ManifoldModel, eigenvalue: int, index: int) -> int:
    """Polynomial degree of a block: per-coordinate frequency on the torus."""
    if model.kind == "torus":
        return math.isqrt(int(eigenvalue))
    return int(index)


@dataclass(frozen=True)
class BlockSelection:
    """Chosen eigenspace blocks ``j_1 < ... < j_m`` laid out consecutively.

    Coordinates ``offsets[s]:offsets[s+1]`` belong to block ``blocks[s]``.
    """

    model: ManifoldModel
    blocks: tuple
    block_dims: tuple
    eigenvalues: tuple

    def __post_init__(self):
        b = self.blocks
        if len(b) == 0:
            raise ConfigurationError("empty block selection")
        if any(x < 0 for x in b) or any(y <= x for x, y in zip(b, b[1:])):
            raise ConfigurationError("blocks must be strictly increasing nonnegative integers")
        if len(self.block_dims) != len(b) or len(self.eigenvalues) != len(b):
            raise ConfigurationError("block metadata length mismatch")
        if any(d < 1 for d in self.block_dims):
            raise ConfigurationError("block dimensions must be positive")

    @classmethod
    def from_spectrum(cls, spec: Spectrum, blocks) -> "BlockSelection":
        blocks = tuple(int(k) for k in blocks)
        if blocks:
            spec.require(max(blocks))
        return cls(
            spec.model,
            blocks,
            tuple(int(spec.multiplicities[k]) for k in blocks),
            tuple(int(spec.eigenvalues[k]) for k in blocks),
        )

    @classmethod
    def contiguous(cls, spec: Spectrum, first: int, last: int) -> "BlockSelection":
        return cls.from_spectrum(spec, range(first, last + 1))

    @cached_property
    def offsets(self) -> tuple:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.block_dims)]))

    @property
    def n(self) -> int:
        return self.offsets[-1]

    @property
    def max_degree(self) -> int:
        return max(block_degree(self.model, v, k) for k, v in zip(self.blocks, self.eigenvalues))

    def block_slice(self, s: int) -> slice:
        return slice(self.offsets[s], self.offsets[s + 1])

    def coordinate_blocks(self) -> np.ndarray:
        """Block index ``j_s`` for every coordinate."""
        return np.repeat(np.asarray(self.blocks), self.block_dims)

    def coordinate_eigenvalues(self) -> np.ndarray:
        return np.repeat(np.asarray(self.eigenvalues, dtype=np.float64), self.block_dims)


def lowest_selection(spec: Spectrum, n: int) -> BlockSelection:
    """Lowest contiguous blocks of total dimension ``n``.

    Zero-mean blocks ``1..K`` are preferred; ``0..K`` is the fallback.
    """
    for first in (1, 0):
        total = spec.dims[first:] - (spec.dims[first - 1] if first else 0)
        hit = np.flatnonzero(total == n)
        if hit.size:
            return BlockSelection.contiguous(spec, first, first + int(hit[0]))
    raise ConfigurationError(f"no run of lowest blocks has dimension {n} for {spec.model.label}")


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    model: ManifoldModel
    points: np.ndarray
    weights: np.ndarray
    exactness: int

    @property
    def size(self) -> int:
        return len(self.weights)


def _uniform(m):
    return 2 * np.pi * np.arange(m) / m


def build_grid(model: ManifoldModel, max_degree: int, oversample: int = OVERSAMPLE) -> QuadratureGrid:
    """Product quadrature exact for polynomials of degree ``oversample * max_degree``.

    Circle and torus: ``oversample * D + 1`` uniform nodes per angle (exact for
    trigonometric degree ``oversample * D``). Sphere: Gauss-Legendre nodes in
    ``cos(colatitude)`` times uniform azimuth.
    """
    if max_degree < 0:
        raise DomainError("max_degree must be nonnegative")
    e = oversample * int(max_degree)
    if model.kind in ("circle", "torus"):
        x = _uniform(e + 1)
        if model.d == 1:
            pts = x[:, None]
        else:
            mesh = np.meshgrid(*([x] * model.d), indexing="ij")
            pts = np.stack([g.ravel() for g in mesh], axis=1)
        w = np.full(len(pts), 1.0 / len(pts))
    elif model.kind == "sphere":
        if model.d != 2:
            raise ConfigurationError("quadrature is implemented for the 2-sphere only")
        nt = e // 2 + 1
        nodes, gw = roots_legendre(nt)
        phi = _uniform(e + 1)
        t = np.arccos(nodes)
        tt, pp = np.meshgrid(t, phi, indexing="ij")
        pts = np.stack([tt.ravel(), pp.ravel()], axis=1)
        w = np.outer(gw / 2.0, np.full(len(phi), 1.0 / len(phi))).ravel()
        w = w / w.sum()
    else:  # pragma: no cover - ManifoldModel validates kind
        raise ConfigurationError(model.kind)
    return QuadratureGrid(model, pts, w, e)


def grid_for(sel: BlockSelection, oversample: int = OVERSAMPLE) -> QuadratureGrid:
    return build_grid(sel.model, sel.max_degree, oversample)


def normalized_legendre(degrees, x):
    """Fully normalized associated Legendre functions.

    Returns ``{(l, m): P(x)}`` for every requested ``l`` and ``0 <= m <= l`` with
    ``(1/2) int_{-1}^{1} P_l^m(x)^2 dx = 1`` (no Condon-Shortley phase). The
    sectoral seed and three-term recurrence stay in range past degree 1000.
    """
    degrees = sorted(set(int(l) for l in degrees))
    x = np.asarray(x, dtype=np.float64)
    s = np.sqrt(np.clip(1.0 - x * x, 0.0, None))
    lmax = degrees[-1]
    wanted = set(degrees)
    out = {}
    pmm = np.ones_like(x)
    for m in range(lmax + 1):
        if m > 0:
            pmm = math.sqrt((2 * m + 1) / (2 * m)) * s * pmm
        if m in wanted:
            out[(m, m)] = pmm
        if m == lmax:
            break
        p_prev = pmm
        p_cur = math.sqrt(2 * m + 3) * x * pmm
        if m + 1 in wanted:
            out[(m + 1, m)] = p_cur
        for l in range(m + 2, lmax + 1):
            a = math.sqrt((4 * l * l - 1) / (l * l - m * m))
            b = math.sqrt((2 * l + 1) * ((l - 1) ** 2 - m * m) / ((2 * l - 3) * (l * l - m * m)))
            p_prev, p_cur = p_cur, a * x * p_cur - b * p_prev
            if l in wanted:
                out[(l, m)] = p_cur
    return out


def torus_representatives(d: int, values) -> dict:
    """For each ``v`` the lattice vectors ``m`` with ``|m|^2 = v`` whose first
    nonzero entry is positive, sorted lexicographically (one per ``+-m`` pair)."""
    values = sorted(set(int(v) for v in values))
    r = math.isqrt(values[-1])
    axis = np.arange(-r, r + 1)
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    lat = np.stack([g.ravel() for g in mesh], axis=1)
    sq = (lat * lat).sum(axis=1)
    nz = lat != 0
    first = np.argmax(nz, axis=1)
    lead = lat[np.arange(len(lat)), first]
    out = {}
    for v in values:
        rows = lat[(sq == v) & (lead > 0)]
        order = np.lexsort(rows.T[::-1])
        out[v] = rows[order]
    return out


def basis_values(sel: BlockSelection, points) -> np.ndarray:
    """Real orthonormal basis of the selected blocks at ``points``: ``(n, P)``."""
    model = sel.model
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    npts = pts.shape[0]
    rows = []
    if model.kind == "circle":
        x = pts[:, 0]
        for k in sel.blocks:
            if k == 0:
                rows.append(np.ones(npts))
            else:
                rows.append(math.sqrt(2) * np.cos(k * x))
                rows.append(math.sqrt(2) * np.sin(k * x))
    elif model.kind == "torus":
        reps = torus_representatives(model.d, sel.eigenvalues)
        for v in sel.eigenvalues:
            if v == 0:
                rows.append(np.ones(npts))
                continue
            phase = pts @ reps[v].T.astype(np.float64)
            for j in range(phase.shape[1]):
                rows.append(math.sqrt(2) * np.cos(phase[:, j]))
                rows.append(math.sqrt(2) * np.sin(phase[:, j]))
    elif model.kind == "sphere":
        if model.d != 2:
            raise ConfigurationError("basis evaluation is implemented for the 2-sphere only")
        t, phi = pts[:, 0], pts[:, 1]
        leg = normalized_legendre(sel.blocks, np.cos(t))
        for l in sel.blocks:
            rows.append(leg[(l, 0)])
            for m in range(1, l + 1):
                rows.append(math.sqrt(2) * leg[(l, m)] * np.cos(m * phi))
                rows.append(math.sqrt(2) * leg[(l, m)] * np.sin(m * phi))
    table = np.array(rows)
    if table.shape[0] != sel.n:  # pragma: no cover - guards the layout contract
        raise ConfigurationError("basis row count does not match the selection")
    return table


@dataclass(frozen=True, eq=False)
class BasisSlice:
    """Basis table ``eta_i(x_j)`` of a block selection on a quadrature grid."""

    selection: BlockSelection
    grid: QuadratureGrid
    table: np.ndarray

    @property
    def n(self) -> int:
        return self.selection.n

    @property
    def model(self) -> ManifoldModel:
        return self.selection.model

    def synthesize(self, coeffs) -> np.ndarray:
        """Grid samples of ``sum_i coeffs_i eta_i``; accepts ``(n,)`` or ``(S, n)``."""
        return np.asarray(coeffs) @ self.table

    def at(self, points) -> np.ndarray:
        return basis_values(self.selection, points)

    def gram(self) -> np.ndarray:
        return (self.table * self.grid.weights) @ self.table.T


def evaluate_basis(model: ManifoldModel, sel: BlockSelection, grid: QuadratureGrid) -> BasisSlice:
    if sel.model != model or grid.model != model:
        raise ConfigurationError("model, selection and grid disagree")
    if grid.exactness < 2 * sel.max_degree:
        raise DomainError(
            f"grid exactness {grid.exactness} < 2 * max degree {sel.max_degree}"
        )
    table = basis_values(sel, grid.points)
    table.setflags(write=False)
    return BasisSlice(sel, grid, table)


def kernel_matrix(basis: BasisSlice, xs, ys) -> np.ndarray:
    """``K_n(x_i, y_j) = sum_k eta_k(x_i) eta_k(y_j)``."""
    return basis.at(xs).T @ basis.at(ys)


def kernel(basis: BasisSlice, x, y) -> float:
    return float(kernel_matrix(basis, x, y)[0, 0])


def lp_norm(values, grid: QuadratureGrid, p: float):
    """Quadrature ``L_p`` norm along the last axis; ``p = inf`` is the grid maximum."""
    p = float(p)
    if not p >= 1:
        raise DomainError(f"p must be >= 1, got {p}")
    v = np.abs(np.asarray(values, dtype=np.float64))
    if v.shape[-1] != grid.size:
        raise DomainError(f"{v.shape[-1]} samples for a grid of {grid.size} points")
    if math.isinf(p):
        return v.max(axis=-1)
    if p == 1.0:
        return v @ grid.weights
    if p == 2.0:
        return np.sqrt((v * v) @ grid.weights)
    # scale out the maximum so large p does not overflow
    top = v.max(axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return np.squeeze(safe, -1) * (((v / safe) ** p) @ grid.weights) ** (1.0 / p)


def nikolskii_bound(n: int, p: float, q: float) -> float:
    """``n^{(1/q - 1/p)_+}``: the bound on ``||xi||_p / ||xi||_q`` (``n`` at ``(inf, 1)``)."""
    return float(n) ** max(1.0 / float(q) - 1.0 / float(p), 0.0)


def nikolskii_check(coeffs, basis: BasisSlice, p: float, q: float) -> tuple[float, float]:
    """``(||xi||_p / ||xi||_q, n^{(1/q - 1/p)_+})`` for ``xi = J coeffs``."""
    vals = basis.synthesize(coeffs)
    lq = float(lp_norm(vals, basis.grid, q))
    if lq == 0.0:
        raise DomainError("zero polynomial: the norm ratio is undefined")
    return float(lp_norm(vals, basis.grid, p)) / lq, nikolskii_bound(basis.n, p, q)


def random_points(model: ManifoldModel, count: int, rng: np.random.Generator) -> np.ndarray:
    """Points drawn from the normalized volume measure."""
    if model.kind in ("circle", "torus"):
        return rng.uniform(0.0, 2 * np.pi, size=(count, model.d))
    if model.d != 2:
        raise ConfigurationError("random points implemented for the 2-sphere only")
    t = np.arccos(rng.uniform(-1.0, 1.0, size=count))
    phi = rng.uniform(0.0, 2 * np.pi, size=count)
    return np.stack([t, phi], axis=1)
