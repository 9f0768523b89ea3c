"""
Block multiplier operators, fractional integrals/derivatives and sampling of
truncated Sobolev balls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _sampling
from .errors import ConfigurationError, DomainError
from .harmonics import BasisSlice, BlockSelection, lp_norm
from .spectra import Spectrum

__all__ = [
    "MultiplierSpec",
    "SobolevSpec",
    "apply_multiplier",
    "det_root",
    "sobolev_multiplier",
    "sample_sobolev_ball",
]


@dataclass(frozen=True)
class MultiplierSpec:
    """Scalars ``lambda_k`` indexed by block (eigenspace) index ``k``."""

    values: tuple
    tag: str = ""

    def __post_init__(self):
        if not all(math.isfinite(v) for v in self.values):
            raise ConfigurationError("multiplier values must be finite")

    @classmethod
    def constant(cls, value: float, length: int, tag: str = "") -> "MultiplierSpec":
        return cls(tuple([float(value)] * length), tag)

    def invertible_on(self, sel: BlockSelection) -> bool:
        return all(self.values[k] != 0 for k in sel.blocks)

    def per_coordinate(self, sel: BlockSelection) -> np.ndarray:
        if max(sel.blocks) >= len(self.values):
            raise ConfigurationError(
                f"multiplier defined for blocks < {len(self.values)}, selection reaches {max(sel.blocks)}"
            )
        return np.repeat(np.array([self.values[k] for k in sel.blocks]), sel.block_dims)


def apply_multiplier(coeffs, spec: MultiplierSpec, sel: BlockSelection) -> np.ndarray:
    """Scale every block of ``coeffs`` (laid out per ``sel``) by its ``lambda``."""
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape[-1] != sel.n:
        raise ConfigurationError(f"coefficient length {coeffs.shape[-1]} != n={sel.n}")
    return coeffs * spec.per_coordinate(sel)


def det_root(spec: MultiplierSpec, sel: BlockSelection) -> float:
    """``|det Lambda_n|^{1/n} = exp(sum_s d_s log|lambda_s| / n)``."""
    lam = np.abs(np.array([spec.values[k] for k in sel.blocks], dtype=np.float64))
    if np.any(lam == 0):
        return 0.0
    return float(np.exp(np.dot(sel.block_dims, np.log(lam)) / sel.n))


@dataclass(frozen=True, eq=False)
class SobolevSpec:
    gamma: float
    p: float
    spectrum: Spectrum

    def __post_init__(self):
        if not self.gamma > 0:
            raise DomainError(f"smoothness must be positive, got {self.gamma}")
        if not float(self.p) >= 1:
            raise DomainError(f"p must be >= 1, got {self.p}")


def sobolev_multiplier(spec: SobolevSpec, sign: str = "integral") -> MultiplierSpec:
    """``theta_k^{-gamma/2}`` (integral) or ``theta_k^{gamma/2}`` (derivative), ``k >= 1``.

    Block 0 (constants) is mapped to zero in both cases.
    """
    if sign not in ("integral", "derivative"):
        raise ConfigurationError(f"sign must be 'integral' or 'derivative', got {sign!r}")
    theta = spec.spectrum.eigenvalues.astype(np.float64)
    e = -spec.gamma / 2 if sign == "integral" else spec.gamma / 2
    vals = np.zeros_like(theta)
    vals[1:] = theta[1:] ** e
    return MultiplierSpec(tuple(vals.tolist()), f"{sign}:gamma={spec.gamma:g}")


def sample_sobolev_ball(spec: SobolevSpec, basis: BasisSlice, count: int, seed: int) -> np.ndarray:
    """Coefficients of ``I_gamma psi`` for ``count`` random ``psi`` with ``||psi||_p = 1``.

    ``psi`` is a normalized Gaussian direction rescaled to unit induced
    ``L_p`` norm, so every row lies on the boundary of the truncated Sobolev ball.
    """
    sel = basis.selection
    if 0 in sel.blocks:
        raise ConfigurationError("Sobolev samples are zero-mean: exclude block 0")
    if count < 1:
        raise DomainError("count must be positive")
    lam = sobolev_multiplier(spec, "integral").per_coordinate(sel)

    def draw(size, rng):
        psi = _sampling.unit_sphere(rng, size, sel.n)
        if float(spec.p) != 2.0:
            psi = psi / lp_norm(basis.synthesize(psi), basis.grid, spec.p)[:, None]
        return psi * lam

    return np.concatenate(_sampling.run_chunks(draw, seed, count))
