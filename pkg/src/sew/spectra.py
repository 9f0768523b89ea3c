"""
Closed-form Laplace-Beltrami spectra on the circle, flat tori and spheres.

All three models carry the normalized (probability) volume measure. Eigenvalues
are stored as exact integers (``int64``) and converted to float where used.

Example::

    >>> s = spectrum(ManifoldModel("sphere", 2), 2)
    >>> s.eigenvalues.tolist(), s.multiplicities.tolist(), s.dims.tolist()
    ([0, 2, 6], [1, 3, 5], [1, 4, 9])
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DomainError, SpectrumExhausted

__all__ = [
    "KINDS",
    "ManifoldModel",
    "Spectrum",
    "spectrum",
    "parse_manifold",
    "weyl_count",
    "weyl_ratio",
    "weyl_limit",
    "ratio_check",
    "torus_lattice_counts",
]

KINDS = ("circle", "torus", "sphere")


@dataclass(frozen=True)
class ManifoldModel:
    """A compact homogeneous model manifold with its probability measure.

    ``kind`` is one of ``"circle"``, ``"torus"`` (flat ``T^d = R^d / 2 pi Z^d``)
    or ``"sphere"`` (``S^d`` embedded in ``R^{d+1}``).
    """

    kind: str
    dimension: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown manifold kind {self.kind!r}")
        d = self.dimension
        if not isinstance(d, (int, np.integer)) or d < 1:
            raise ConfigurationError(f"dimension must be a positive integer, got {d!r}")
        if self.kind == "circle" and d != 1:
            raise ConfigurationError("the circle has dimension 1")
        if self.kind == "sphere" and d < 2:
            raise ConfigurationError("use kind='circle' for the one-dimensional sphere")

    @property
    def d(self) -> int:
        return int(self.dimension)

    @property
    def total_measure(self) -> float:
        return 1.0

    @property
    def label(self) -> str:
        if self.kind == "circle":
            return "circle"
        return f"{self.kind}{self.d}"


def parse_manifold(text: str) -> ManifoldModel:
    """Parse ``circle``, ``sphere2``, ``torus3`` style labels."""
    text = text.strip().lower()
    if text in ("circle", "s1", "torus1"):
        return ManifoldModel("circle", 1)
    for kind in ("sphere", "torus"):
        if text.startswith(kind):
            rest = text[len(kind):] or "2"
            try:
                d = int(rest)
            except ValueError:
                raise ConfigurationError(f"cannot parse manifold {text!r}") from None
            if kind == "torus" and d == 1:
                return ManifoldModel("circle", 1)
            return ManifoldModel(kind, d)
    raise ConfigurationError(f"cannot parse manifold {text!r}")


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Distinct eigenvalues ``theta_k``, multiplicities ``d_k`` and cumulative
    dimensions ``tau_N = sum_{k<=N} d_k`` for ``k = 0..n_max``."""

    model: ManifoldModel
    eigenvalues: np.ndarray
    multiplicities: np.ndarray
    dims: np.ndarray

    @property
    def n_max(self) -> int:
        return len(self.eigenvalues) - 1

    def theta(self, k) -> float:
        return float(self.eigenvalues[k])

    def tau(self, k) -> int:
        return int(self.dims[k])

    def require(self, k: int) -> None:
        if k > self.n_max:
            raise SpectrumExhausted(
                f"index {k} beyond computed spectrum (n_max={self.n_max})", needed=k
            )


def _frozen(a):
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


def torus_lattice_counts(d: int, vmax: int) -> np.ndarray:
    """``r[v] = #{m in Z^d : |m|^2 = v}`` for ``0 <= v <= vmax``."""
    r = np.zeros(vmax + 1, dtype=np.int64)
    r[0] = 1
    mmax = math.isqrt(vmax)
    for _ in range(d):
        nxt = np.zeros_like(r)
        for m in range(-mmax, mmax + 1):
            s = m * m
            nxt[s:] += r[: vmax + 1 - s]
        r = nxt
    return r


def _torus(d, n_max):
    vmax = max(8, 2 * (n_max + 1))
    while True:
        r = torus_lattice_counts(d, vmax)
        vals = np.flatnonzero(r)
        if len(vals) >= n_max + 1:
            vals = vals[: n_max + 1]
            return vals, r[vals]
        vmax *= 2


def _sphere_multiplicities(d, n_max):
    k = np.arange(n_max + 1, dtype=np.int64)
    if d == 2:
        return 2 * k + 1
    out = [math.comb(j + d, d) - (math.comb(j + d - 2, d) if j >= 2 else 0) for j in range(n_max + 1)]
    return np.array(out, dtype=np.int64)


def spectrum(model: ManifoldModel, n_max: int) -> Spectrum:
    """Closed-form spectrum of ``model`` for block indices ``0..n_max``.

    Circle: ``theta_k = k^2``, ``d_k = 2`` for ``k >= 1``.
    Sphere ``S^d``: ``theta_k = k(k + d - 1)`` with the harmonic dimension count.
    Torus ``T^d``: the distinct values of ``|m|^2``, ``m in Z^d``, in increasing
    order, each with its lattice-point count as multiplicity.
    """
    if not isinstance(model, ManifoldModel):
        raise ConfigurationError("model must be a ManifoldModel")
    if n_max < 0:
        raise DomainError("n_max must be nonnegative")
    k = np.arange(n_max + 1, dtype=np.int64)
    if model.kind == "circle":
        theta = k * k
        mult = np.where(k == 0, 1, 2)
    elif model.kind == "sphere":
        theta = k * (k + model.d - 1)
        mult = _sphere_multiplicities(model.d, n_max)
    else:
        theta, mult = _torus(model.d, n_max)
    return Spectrum(model, _frozen(theta), _frozen(mult), _frozen(np.cumsum(mult)))


def weyl_count(spec: Spectrum, a: float) -> int:
    """Number of eigenvalues strictly below ``a``, counted with multiplicity."""
    idx = int(np.searchsorted(spec.eigenvalues, a, side="left"))
    return int(spec.dims[idx - 1]) if idx > 0 else 0


def weyl_ratio(spec: Spectrum, a: float) -> float:
    """``n(a) * a^{-d/2}``; ``a`` must lie in ``(0, theta_{n_max}]``."""
    if not a > 0:
        raise DomainError(f"a must be positive, got {a}")
    if a > spec.eigenvalues[-1]:
        raise DomainError(
            f"a={a} exceeds the largest computed eigenvalue {int(spec.eigenvalues[-1])}"
        )
    return weyl_count(spec, a) * float(a) ** (-spec.model.d / 2)


def weyl_limit(model: ManifoldModel) -> float:
    """Limit of ``n(a) a^{-d/2}`` under the normalized measure.

    Torus: volume of the unit ``d``-ball (lattice points in a ball of radius
    ``sqrt(a)``); circle gives 2. Sphere ``S^d``: ``2 / d!``.
    """
    d = model.d
    if model.kind == "sphere":
        return 2.0 / math.factorial(d)
    return math.pi ** (d / 2) / math.gamma(1 + d / 2)


def ratio_check(spec: Spectrum, n: int) -> tuple[float, float]:
    """``(theta_{N+1}/theta_N, tau_{N+1}/tau_N)`` for ``1 <= N < n_max``."""
    if n < 1 or n + 1 > spec.n_max:
        raise DomainError(f"N={n} out of range [1, {spec.n_max - 1}]")
    th = spec.eigenvalues
    tau = spec.dims
    return float(th[n + 1]) / float(th[n]), float(tau[n + 1]) / float(tau[n])
