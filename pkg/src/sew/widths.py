"""
Kolmogorov/Bernstein width machinery.

The constructive part is the dyadic block allocation: the spectrum is cut at
indices ``N_0 = N < N_1 < ...`` where the eigenvalue grows by ``2^{2/gamma}``,
and block ``k`` is approximated by a subspace of dimension
``m_k = floor(2^{-eps k} tau_N) + 1`` (``m_0 = tau_N``), up to
``M = floor(log(tau_N) / eps)`` blocks.

Coefficient vectors here are zero-mean: coordinates run over the eigenspaces
``1, 2, ...`` in spectral order, so eigenspace ``j`` occupies coordinates
``tau_{j-1} - 1 .. tau_j - 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _sampling
from .errors import ConfigurationError, DomainError, HypothesisViolation, SpectrumExhausted
from .harmonics import BlockSelection, evaluate_basis, grid_for
from .norms import DualNorm, InducedNorm, levy_mean
from .spectra import ManifoldModel, Spectrum, spectrum as make_spectrum

__all__ = [
    "BlockAllocation",
    "WidthReport",
    "PTJReport",
    "dyadic_blocks",
    "admissible_eps",
    "rank_schedule",
    "allocate_ranks",
    "allocation_checks",
    "envelope_delta",
    "spectrum_for_allocation",
    "build_approximant",
    "worst_case_error",
    "width_bounds",
    "ptj_check",
    "bernstein_check",
]


@dataclass(frozen=True)
class WidthReport:
    kind: str
    n: int
    value: float
    params: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("kolmogorov-lower", "kolmogorov-upper", "bernstein-lower", "empirical-approx"):
            raise DomainError(f"unknown width report kind {self.kind!r}")
        if not self.value >= 0:
            raise DomainError("width values are nonnegative")


def dyadic_blocks(spec: Spectrum, n0: int, gamma: float, count: int) -> tuple:
    """Boundaries ``N_0 = n0, N_1, ..., N_count``.

    ``N_{k+1}`` is the least index with ``theta_{N_{k+1}} >= 2^{2/gamma} theta_{N_k}``,
    which gives ``theta_{N_{k+1}-1} <= 2^{2/gamma} theta_{N_k} <= theta_{N_{k+1}}``.
    """
    if n0 < 1:
        raise DomainError("N must be at least 1 (theta_0 = 0)")
    if not gamma > 0:
        raise DomainError("gamma must be positive")
    spec.require(n0)
    factor = 2.0 ** (2.0 / gamma)
    theta = spec.eigenvalues
    out = [int(n0)]
    for _ in range(count):
        target = factor * float(theta[out[-1]])
        j = int(np.searchsorted(theta, target, side="left"))
        if j > spec.n_max:
            need = int(math.ceil(out[-1] * factor ** 0.5 * 1.5)) + 8
            raise SpectrumExhausted(
                f"spectrum exhausted at boundary {len(out)}; extend beyond n_max={spec.n_max}", needed=need
            )
        out.append(j)
    return tuple(out)


def admissible_eps(gamma: float, d: int, q: float) -> float:
    """Supremum of admissible ``eps``: ``min(2 - d/gamma, (gamma - d s)/(gamma d s))``
    with ``s = 1/2 - 1/q`` and the unspecified constant set to 1."""
    if not gamma > d / 2:
        raise HypothesisViolation(f"needs gamma > d/2 (gamma={gamma}, d={d})")
    q = float(q)
    if q < 2:
        raise HypothesisViolation(f"needs q >= 2, got {q}")
    bound = 2.0 - d / gamma
    s = 0.5 - (0.0 if math.isinf(q) else 1.0 / q)
    if s > 0:
        bound = min(bound, (gamma - d * s) / (gamma * d * s))
    return bound


def rank_schedule(tau_n: int, eps: float) -> tuple[int, tuple]:
    """``M = floor(log(tau_N)/eps)`` and ``m_0 = tau_N``, ``m_k = floor(2^{-eps k} tau_N) + 1``."""
    if not eps > 0:
        raise DomainError("eps must be positive")
    m_blocks = int(math.floor(math.log(tau_n) / eps))
    ranks = [int(tau_n)] + [int(math.floor(2.0 ** (-eps * k) * tau_n)) + 1 for k in range(1, m_blocks + 1)]
    return m_blocks, tuple(ranks)


@dataclass(frozen=True, eq=False)
class BlockAllocation:
    """Dyadic blocks with their ranks.

    Block 0 holds eigenspaces ``1..N`` (``tau_N - 1`` zero-mean coordinates, all
    kept by ``m_0 = tau_N``); block ``k >= 1`` holds eigenspaces
    ``N_{k-1}+1 .. N_k``. Everything above ``N_M`` is dropped.
    """

    spectrum: Spectrum
    N: int
    gamma: float
    d: int
    q: float
    eps: float
    eps_sup: float
    M: int
    boundaries: tuple  # N_{-1} = 1, N_0, ..., N_{M+1}
    block_dims: tuple  # l_k, k = 0..M
    ranks: tuple  # m_k, k = 0..M
    tau_N: int

    @property
    def mu(self) -> int:
        return int(sum(self.ranks))

    @property
    def kept(self) -> tuple:
        return tuple(min(m, l) for m, l in zip(self.ranks, self.block_dims))

    @property
    def dimension(self) -> int:
        """Dimension of the approximating subspace, ``sum_k min(m_k, l_k) <= mu``."""
        return int(sum(self.kept))

    @property
    def offsets(self) -> tuple:
        """Zero-mean coordinate offsets of blocks ``0..M``."""
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.block_dims)]))

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "gamma": self.gamma,
            "d": self.d,
            "q": self.q,
            "eps": self.eps,
            "eps_sup": self.eps_sup,
            "M": self.M,
            "boundaries": list(self.boundaries),
            "block_dims": list(self.block_dims),
            "ranks": list(self.ranks),
            "tau_N": self.tau_N,
            "mu": self.mu,
            "mu_over_tau": self.mu / self.tau_N,
            "dimension": self.dimension,
        }


def spectrum_for_allocation(model: ManifoldModel, N: int, gamma: float, eps: float) -> Spectrum:
    """A spectrum long enough to host ``N_0..N_{M+1}``."""
    tau = int(make_spectrum(model, N).dims[-1])
    m_blocks = int(math.floor(math.log(tau) / eps))
    n_max = 2 * N + 16
    while True:
        spec = make_spectrum(model, n_max)
        try:
            dyadic_blocks(spec, N, gamma, m_blocks + 1)
            return spec
        except SpectrumExhausted:
            n_max *= 2


def allocate_ranks(spec: Spectrum, N: int, gamma: float, d: int, q: float = 2.0, eps: float | None = None) -> BlockAllocation:
    """Dyadic allocation; ``eps`` defaults to ``0.75 * admissible_eps``."""
    sup = admissible_eps(gamma, d, q)
    if eps is None:
        eps = 0.75 * sup if math.isfinite(sup) else 1.0
    if not 0 < eps < sup:
        raise HypothesisViolation(f"eps={eps} outside the admissible interval (0, {sup:.6g})")
    spec.require(N)
    tau_n = int(spec.dims[N])
    m_blocks, ranks = rank_schedule(tau_n, eps)
    bounds = dyadic_blocks(spec, N, gamma, m_blocks + 1)
    dims = spec.dims
    ldims = [tau_n - 1] + [int(dims[bounds[k]] - dims[bounds[k - 1]]) for k in range(1, m_blocks + 1)]
    return BlockAllocation(
        spec, int(N), float(gamma), int(d), float(q), float(eps), float(sup), m_blocks,
        (1,) + bounds, tuple(ldims), ranks, tau_n,
    )


def allocation_checks(alloc: BlockAllocation) -> dict:
    """Exact checks of the sandwich, rank and budget invariants."""
    theta = alloc.spectrum.eigenvalues
    factor = 2.0 ** (2.0 / alloc.gamma)
    b = alloc.boundaries[1:]
    sandwich = all(
        float(theta[b[k + 1] - 1]) <= factor * float(theta[b[k]]) <= float(theta[b[k + 1]])
        for k in range(len(b) - 1)
    )
    m_blocks, ranks = rank_schedule(alloc.tau_N, alloc.eps)
    return {
        "sandwich": sandwich,
        "ranks": ranks == alloc.ranks and m_blocks == alloc.M,
        "mu": alloc.mu == sum(ranks),
        "mu_over_tau": alloc.mu / alloc.tau_N,
    }


def envelope_delta(alloc: BlockAllocation) -> np.ndarray:
    """``delta_k = (theta_{N_k} / (2^{2k/gamma} theta_N))^{1/k} - 1`` for ``k >= 1``."""
    theta = alloc.spectrum.eigenvalues
    b = alloc.boundaries[1:]
    k = np.arange(1, len(b))
    ratio = np.array([float(theta[x]) for x in b[1:]]) / (2.0 ** (2.0 * k / alloc.gamma) * float(theta[b[0]]))
    return ratio ** (1.0 / k) - 1.0


def _layout(alloc, length):
    dims = alloc.spectrum.dims
    if length + 1 <= dims[-1] and length + 1 not in set(dims.tolist()):
        raise ConfigurationError(f"coefficient length {length} does not end on an eigenspace boundary")


def build_approximant(coeffs, alloc: BlockAllocation, rule: str = "truncate", seed: int = 0, draws: int = 32):
    """Project zero-mean coefficients onto the allocated subspace.

    ``truncate`` keeps the first ``min(m_k, l_k)`` coordinates of every block
    (lowest eigenvalues, hence largest Sobolev multipliers): one fixed linear
    subspace. ``random-subspace`` draws ``draws`` uniformly random
    ``m_k``-dimensional subspaces per block and keeps the one with the smallest
    worst residual over the supplied rows. Blocks past ``M`` are zeroed.
    """
    if rule not in ("truncate", "random-subspace"):
        raise ConfigurationError(f"unknown rule {rule!r}")
    c = np.asarray(coeffs, dtype=np.float64)
    single = c.ndim == 1
    c = np.atleast_2d(c)
    _layout(alloc, c.shape[1])
    out = np.zeros_like(c)
    offs = alloc.offsets
    rng = np.random.default_rng(_sampling.seed_sequence(seed))
    for k, keep in enumerate(alloc.kept):
        lo, hi = offs[k], min(offs[k + 1], c.shape[1])
        if lo >= hi:
            break
        block = c[:, lo:hi]
        width = hi - lo
        keep = min(keep, width)
        if rule == "truncate" or keep == width:
            out[:, lo:lo + keep] = block[:, :keep]
        else:
            if keep == 0:
                continue
            best, best_res = None, math.inf
            for _ in range(draws):
                qmat, _ = np.linalg.qr(rng.standard_normal((width, keep)))
                proj = (block @ qmat) @ qmat.T
                res = float(np.max(np.linalg.norm(block - proj, axis=1)))
                if res < best_res:
                    best, best_res = proj, res
            out[:, lo:hi] = best
    return out[0] if single else out


def worst_case_error(alloc: BlockAllocation) -> float:
    """``sup_{||psi||_2 <= 1} ||I_gamma psi - P I_gamma psi||_2`` for the truncate rule.

    Equals the largest multiplier ``theta_j^{-gamma/2}`` among dropped
    eigenspaces, including the tail above ``N_M``.
    """
    dims = alloc.spectrum.dims
    theta = alloc.spectrum.eigenvalues
    b = alloc.boundaries[1:]
    first = [b[alloc.M] + 1]
    for k, (keep, l) in enumerate(zip(alloc.kept, alloc.block_dims)):
        if keep < l:
            start_index = 1 if k == 0 else b[k - 1] + 1
            coord = (int(dims[start_index - 1]) - 1) + keep
            # eigenspace holding zero-mean coordinate `coord`
            first.append(int(np.searchsorted(dims, coord + 1, side="right")))
    j = min(first)
    return float(theta[j]) ** (-alloc.gamma / 2)


def width_bounds(n: int, gamma: float, d: int, p: float, q: float):
    """``(lower, upper)`` Kolmogorov width reports; a side is ``None`` outside its range.

    Lower ``n^{-gamma/d}`` for ``1 < p, q < inf``; upper ``n^{-gamma/d} q^{1/2}``
    (``2 <= q < inf``) or ``n^{-gamma/d} (log n)^{1/2}`` (``q = inf``), needing
    ``p, q >= 2`` and ``gamma > d/2``. Constants are 1.
    """
    if n < 2:
        raise DomainError("n must be at least 2")
    p, q = float(p), float(q)
    if p < 1 or q < 1:
        raise DomainError("exponents must be >= 1")
    base = float(n) ** (-gamma / d)
    params = {"gamma": gamma, "d": d, "p": p, "q": q}
    meta = {"constant": 1}
    lower = upper = None
    if 1 < p < math.inf and 1 < q < math.inf:
        lower = WidthReport("kolmogorov-lower", n, base, params, meta)
    if p >= 2 and q >= 2:
        if not gamma > d / 2:
            if lower is None:
                raise HypothesisViolation(f"upper width bound needs gamma > d/2 (gamma={gamma}, d={d})")
        else:
            factor = math.sqrt(math.log(n)) if math.isinf(q) else math.sqrt(q)
            upper = WidthReport("kolmogorov-upper", n, base * factor, params, meta)
    if lower is None and upper is None:
        raise HypothesisViolation(f"no width bound applies to p={p}, q={q}, gamma={gamma}, d={d}")
    return lower, upper


def _circle_selection(n):
    spec = make_spectrum(ManifoldModel("circle"), n // 2 + 1)
    if n % 2 == 0:
        return BlockSelection.contiguous(spec, 1, n // 2)
    return BlockSelection.contiguous(spec, 0, n // 2)


@dataclass(frozen=True)
class PTJReport:
    n: int
    s: int
    q_prime: float
    lam: float
    levy_mean: float
    constants: tuple
    target: float
    fraction_within_target: float
    seed: int

    @property
    def minimum(self) -> float:
        return min(self.constants)

    @property
    def exists(self) -> bool:
        return self.minimum <= self.target


def ptj_check(n: int, q_prime: float, lam: float, trials: int, seed: int, target: float = 1.0,
              directions: int = 64, levy_samples: int = 20_000, selection: BlockSelection | None = None) -> PTJReport:
    """Random-subspace probe of the proportional-subspace inequality.

    For ``trials`` uniformly random subspaces ``X_s`` (``s = ceil(lam n)``) the
    constant ``C = sqrt(1 - lam) / M * sup_{alpha in X_s, |alpha| = 1} 1 / ||alpha||°``
    is estimated from ``directions`` random unit vectors of ``X_s``; ``||.||°`` is
    dual to the induced ``L_{q'}`` norm and ``M`` is that norm's Levy mean.
    Default coefficient space: the circle harmonics of dimension ``n``.
    """
    s = int(math.ceil(lam * n))
    if not 0 < lam < 1 or s >= n:
        raise DomainError(f"need 0 < lam < 1 and ceil(lam n) < n (got s={s}, n={n})")
    if q_prime < 2:
        raise DomainError("q' must be at least 2")
    sel = selection or _circle_selection(n)
    if sel.n != n:
        raise ConfigurationError("selection dimension differs from n")
    basis = evaluate_basis(sel.model, sel, grid_for(sel))
    nm = InducedNorm(basis, q_prime)
    m = levy_mean(nm, levy_samples, seed).mean
    dual = DualNorm(nm, tol=1e-7)
    ss = _sampling.seed_sequence(seed).spawn(trials)
    consts = []
    for child in ss:
        rng = np.random.default_rng(child)
        qmat, _ = np.linalg.qr(rng.standard_normal((n, s)))
        alphas = _sampling.unit_sphere(rng, directions, s) @ qmat.T
        consts.append(float(np.max(1.0 / dual(alphas))) * math.sqrt(1 - lam) / m)
    frac = float(np.mean(np.array(consts) <= target))
    return PTJReport(n, s, float(q_prime), float(lam), m, tuple(consts), float(target), frac, int(seed))


def bernstein_check(spec: Spectrum, M: int, gamma: float, q: float, seed: int, count: int = 1000) -> WidthReport:
    """Containment ``theta_M^{-gamma/2} U_2 cap T_M subset W_2^gamma`` on random
    zero-mean ``z`` in ``T_M`` and the resulting ``b_n`` lower order.

    The report value is ``n^{-gamma/d}`` with ``n = floor(tau_M / 2) - 1``.
    """
    q = float(q)
    if not 1 < q <= 2:
        raise DomainError(f"q must lie in (1, 2], got {q}")
    if M < 1:
        raise DomainError("M must be at least 1: T_0 holds only constants")
    spec.require(M)
    sel = BlockSelection.contiguous(spec, 1, M)
    theta = sel.coordinate_eigenvalues()
    up = theta ** (gamma / 2)
    top = float(spec.eigenvalues[M]) ** (gamma / 2)
    rng = np.random.default_rng(_sampling.seed_sequence(seed))
    z = rng.standard_normal((count, sel.n))
    ratios = np.linalg.norm(z * up, axis=1) / (top * np.linalg.norm(z, axis=1))
    zt = rng.standard_normal((count, sel.n))
    zt[:, : sel.offsets[-2]] = 0.0
    tight = np.linalg.norm(zt * up, axis=1) / (top * np.linalg.norm(zt, axis=1))
    m_dim = int(spec.dims[M])
    s = m_dim // 2
    n = max(s - 1, 1)
    d = spec.model.d
    return WidthReport(
        "bernstein-lower",
        n,
        float(n) ** (-gamma / d),
        {"M": M, "gamma": gamma, "q": q, "d": d, "dim_T_M": m_dim, "s": s},
        {
            "constant": 1,
            "radius": top ** -1.0,
            "max_ratio": float(ratios.max()),
            "contained": bool(np.all(ratios <= 1.0 + 1e-12)),
            "top_block_max_deviation": float(np.max(np.abs(tight - 1.0))),
            "samples": count,
            "seed": int(seed),
        },
    )
