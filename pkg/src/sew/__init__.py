"""Entropy numbers and widths of Sobolev classes on compact homogeneous manifolds.

Submodules: :mod:`sew.spectra`, :mod:`sew.harmonics`, :mod:`sew.norms`,
:mod:`sew.operators`, :mod:`sew.entropy`, :mod:`sew.widths`, :mod:`sew.cli`.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CapabilityError,
    ConfigurationError,
    ConvergenceError,
    DomainError,
    HypothesisViolation,
    SewError,
    SpectrumExhausted,
)
from .spectra import ManifoldModel, Spectrum, parse_manifold, spectrum  # noqa: E402
from .harmonics import BlockSelection, evaluate_basis, grid_for, lowest_selection  # noqa: E402
from .norms import DualNorm, InducedNorm, levy_mean  # noqa: E402
from .operators import MultiplierSpec, SobolevSpec, sobolev_multiplier  # noqa: E402
from .entropy import sobolev_entropy_lower, sobolev_entropy_upper  # noqa: E402
from .widths import allocate_ranks, width_bounds  # noqa: E402

__all__ = [
    "__version__",
    "SewError",
    "ConfigurationError",
    "DomainError",
    "HypothesisViolation",
    "CapabilityError",
    "SpectrumExhausted",
    "ConvergenceError",
    "ManifoldModel",
    "Spectrum",
    "parse_manifold",
    "spectrum",
    "BlockSelection",
    "evaluate_basis",
    "grid_for",
    "lowest_selection",
    "InducedNorm",
    "DualNorm",
    "levy_mean",
    "MultiplierSpec",
    "SobolevSpec",
    "sobolev_multiplier",
    "sobolev_entropy_lower",
    "sobolev_entropy_upper",
    "allocate_ranks",
    "width_bounds",
]
