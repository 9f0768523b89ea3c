"""
Entropy numbers: the volume lower bound in terms of Levy means, its Sobolev
specialization, small-dimensional empirical covering/packing, and the
width-to-entropy transfer with the composed upper bound.

Every formula sets its unspecified absolute constant to 1 and records
``constant=1`` in the report metadata; only n-scaling is meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import _sampling
from .errors import CapabilityError, DomainError, HypothesisViolation
from .norms import LevyEstimate

__all__ = [
    "BoundReport",
    "CoveringReport",
    "entropy_lower_bound",
    "volume_ratio",
    "hit_or_miss_ratio",
    "lower_factor",
    "upper_factor",
    "sobolev_entropy_lower",
    "sobolev_entropy_upper",
    "body_samples",
    "farthest_point_radii",
    "empirical_covering",
    "check_sandwich",
    "carl_transfer",
    "doubling_constant",
]

KINDS = ("lower-volume", "lower-sobolev", "upper-carl", "upper-composed", "empirical-cover", "empirical-pack")


@dataclass(frozen=True)
class BoundReport:
    kind: str
    index: int
    value: float
    params: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown report kind {self.kind!r}")
        if not self.value >= 0:
            raise DomainError(f"bound must be nonnegative, got {self.value}")


@dataclass(frozen=True)
class CoveringReport:
    radius: float
    centers: int
    direction: str  # "upper" (covering) or "lower" (packing)


def entropy_lower_bound(detroot: float, m_x: float, m_ydual: float, k: int, n: int) -> float:
    """``2^{-1-k/n} |det Lambda_n|^{1/n} / (M_X * M_Y°)``."""
    if min(detroot, m_x, m_ydual) <= 0 or k < 1 or n < 1:
        raise DomainError("all inputs must be positive")
    return 2.0 ** (-1.0 - k / n) * detroot / (m_x * m_ydual)


def volume_ratio(norm, samples: int, seed: int, workers: int = 1) -> LevyEstimate:
    """``(Vol B / Vol B_2)^{1/n} = (E ||alpha||^{-n})^{1/n}`` over the unit sphere.

    The standard error is propagated by the delta method.
    """
    n = norm.n
    if n > 8:
        raise CapabilityError("the ||alpha||^{-n} average is unreliable beyond n = 8")
    vals = _sampling.sphere_values(lambda a: np.asarray(norm(a)) ** (-float(n)), n, seed, samples, workers)
    m = float(np.mean(vals))
    se = float(np.std(vals, ddof=1)) / math.sqrt(len(vals))
    r = m ** (1.0 / n)
    return LevyEstimate(r, r * se / (n * m), len(vals), int(seed))


def _log_ball_volume(n):
    return 0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1)


def hit_or_miss_ratio(norm, samples: int, seed: int, radius: float = 1.0, workers: int = 1) -> LevyEstimate:
    """Hit-or-miss estimate of ``(Vol B / Vol B_2)^{1/n}`` from the cube ``[-radius, radius]^n``.

    ``radius`` must bound the Euclidean length of every point of ``B``.
    """
    n = norm.n

    def task(size, rng):
        x = rng.uniform(-radius, radius, size=(size, n))
        return (np.asarray(norm(x)) <= 1.0).astype(np.float64)

    hits = np.concatenate(_sampling.run_chunks(task, seed, samples, workers))
    frac = float(hits.mean())
    se = math.sqrt(max(frac * (1 - frac), 0.0) / len(hits))
    log_cube = n * math.log(2 * radius)
    scale = math.exp((log_cube - _log_ball_volume(n)) / n)
    r = scale * frac ** (1.0 / n)
    return LevyEstimate(r, r * se / (n * frac) if frac > 0 else math.inf, len(hits), int(seed))


def _check_exponent(x, name):
    x = float(x)
    if not x >= 1:
        raise DomainError(f"{name} must lie in [1, inf], got {x}")
    return x


def _q_term(q):
    # 1/(q-1) with the q = inf endpoint read through Hölder: q' = q/(q-1) -> 1
    return 1.0 if math.isinf(q) else 1.0 / (q - 1.0)


def lower_factor(n: float, p: float, q: float) -> float:
    """Logarithmic/exponent factor of the Sobolev entropy lower bound.

    ``(p/(q-1))^{-1/2}``, ``(p log n)^{-1/2}``, ``(log n/(q-1))^{-1/2}`` or
    ``(log n)^{-1}`` for ``(p<inf, q>1)``, ``(p<inf, q=1)``, ``(p=inf, q>1)``,
    ``(p=inf, q=1)``. At ``q = inf`` the factor ``1/(q-1)`` is replaced by its
    Hölder-conjugate limit 1.
    """
    p = _check_exponent(p, "p")
    q = _check_exponent(q, "q")
    log_n = math.log(n)
    if not math.isinf(p):
        if q > 1:
            return (p * _q_term(q)) ** -0.5
        return (p * log_n) ** -0.5
    if q > 1:
        return (log_n * _q_term(q)) ** -0.5
    return 1.0 / log_n


def sobolev_entropy_lower(n: int, gamma: float, d: int, p: float, q: float) -> float:
    """``n^{-gamma/d}`` times :func:`lower_factor`, constant 1."""
    if n < 2:
        raise DomainError("n must be at least 2")
    if not gamma > 0 or d < 1:
        raise DomainError("gamma must be positive and d a positive integer")
    return float(n) ** (-gamma / d) * lower_factor(n, p, q)


def _to_lq_factor(n, q):
    # e_n(I_{gamma/2}: L_2 -> L_q) without its power of n
    return math.sqrt(math.log(n)) if math.isinf(q) else math.sqrt(q)


def _from_lp_factor(n, p):
    # e_n(I_{gamma/2}: L_p -> L_2) without its power of n
    return math.sqrt(math.log(n)) if p == 1.0 else (p - 1.0) ** -0.5


def upper_factor(n: float, p: float, q: float) -> float:
    """``(q/(p-1))^{1/2}``, ``(q log n)^{1/2}``, ``(log n/(p-1))^{1/2}`` or ``log n``."""
    p = _check_exponent(p, "p")
    q = _check_exponent(q, "q")
    if p > 2 or q < 2:
        raise HypothesisViolation(f"upper bound needs 1 <= p <= 2 <= q, got p={p}, q={q}")
    return _from_lp_factor(n, p) * _to_lq_factor(n, q)


def sobolev_entropy_upper(n: int, gamma: float, d: int, p: float, q: float) -> float:
    """Composition ``e_n(I_{gamma/2}: L_p -> L_2) * e_n(I_{gamma/2}: L_2 -> L_q)``, constant 1."""
    if n < 2:
        raise DomainError("n must be at least 2")
    if not gamma > d:
        raise HypothesisViolation(f"upper entropy bound needs gamma > d (gamma={gamma}, d={d})")
    half = float(n) ** (-gamma / (2 * d))
    p = _check_exponent(p, "p")
    q = _check_exponent(q, "q")
    if p > 2 or q < 2:
        raise HypothesisViolation(f"upper bound needs 1 <= p <= 2 <= q, got p={p}, q={q}")
    return (half * _from_lp_factor(n, p)) * (half * _to_lq_factor(n, q))


def body_samples(norm, count: int, seed: int, linear=None) -> np.ndarray:
    """Dense sample of the unit ball of ``norm`` (optionally mapped by ``linear``).

    Directions are normalized Gaussians rescaled onto the boundary; radii are
    ``U^{1/n}``. The result covers the body densely; it is not volume-uniform
    unless the ball is Euclidean.
    """
    n = norm.n

    def task(size, rng):
        u = _sampling.unit_sphere(rng, size, n)
        u = u / np.asarray(norm(u))[:, None]
        return u * rng.uniform(size=(size, 1)) ** (1.0 / n)

    pts = np.concatenate(_sampling.run_chunks(task, seed, count))
    if linear is not None:
        pts = pts * np.asarray(linear) if np.ndim(linear) == 1 else pts @ np.asarray(linear).T
    return pts


def farthest_point_radii(points, metric, count: int, include_origin: bool = True) -> np.ndarray:
    """Greedy farthest-point traversal.

    ``r[j]`` (``j >= 1``) is the covering radius of the first ``j`` centers; the
    first ``j + 1`` centers are pairwise at least ``r[j]`` apart. The first
    center is the origin when ``include_origin`` (symmetric convex bodies),
    otherwise ``points[0]``.
    """
    pts = np.asarray(points, dtype=np.float64)
    if include_origin:
        first = np.zeros(pts.shape[1])
    else:
        first = pts[0]
    dist = np.asarray(metric(pts - first), dtype=np.float64)
    radii = np.empty(count + 1)
    radii[0] = math.inf
    for j in range(1, count + 1):
        i = int(np.argmax(dist))
        radii[j] = dist[i]
        if j < count:
            dist = np.minimum(dist, metric(pts - pts[i]))
    return radii


def empirical_covering(points, metric, k: int, budget: int = 1 << 15, include_origin: bool = True):
    """``(upper, lower)`` estimates of ``e_k`` for the sampled body.

    Upper: covering radius of ``2^{k-1}`` greedy centers (of the sample).
    Lower: those centers plus the next farthest point are ``2^{k-1} + 1`` points
    pairwise ``>= r`` apart, so no ``2^{k-1}`` balls of radius ``< r/2`` cover them.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.shape[1] > 6:
        raise CapabilityError("empirical covering is limited to dimension <= 6")
    if k < 1:
        raise DomainError("k must be positive")
    m = 1 << (k - 1)
    if m > budget:
        raise CapabilityError(f"2^(k-1) = {m} centers exceed the budget {budget}")
    r = farthest_point_radii(pts, metric, m + 1, include_origin)[m]
    return CoveringReport(float(r), m, "upper"), CoveringReport(float(r) / 2.0, m + 1, "lower")


def check_sandwich(upper: CoveringReport, lower: CoveringReport) -> None:
    if not (lower.radius <= upper.radius and lower.centers > upper.centers):
        raise AssertionError(f"packing/covering sandwich violated: {lower} vs {upper}")


def _f_star(l, gamma_over_d, log_factor):
    l = np.asarray(l, dtype=np.float64)
    f = l ** gamma_over_d
    if log_factor == "inverse-sqrt-log":
        f = f / np.sqrt(np.log(np.maximum(l, 2.0)))
    elif log_factor != "none":
        raise DomainError(f"unknown log factor {log_factor!r}")
    return f


def doubling_constant(gamma_over_d: float, log_factor: str = "none", jmax: int = 20, jmin: int = 2) -> float:
    """``max_{jmin <= j <= jmax} f*(2^j) / f*(2^{j-1})``."""
    j = np.arange(jmin, jmax + 1)
    f = _f_star(2.0 ** j, gamma_over_d, log_factor)
    g = _f_star(2.0 ** (j - 1), gamma_over_d, log_factor)
    return float(np.max(f / g))


def carl_transfer(widths, gamma_over_d: float, log_factor: str = "none") -> list:
    """Entropy bounds ``sup_{l<=n} f*(l) d_l / f*(n)`` from a width sequence ``d_1..d_N``.

    ``f*(l) = l^{gamma/d}`` optionally divided by ``sqrt(log l)`` (with
    ``log max(l, 2)`` so ``f*(1)`` is finite).
    """
    w = np.asarray(widths, dtype=np.float64)
    if w.ndim != 1 or len(w) == 0:
        raise DomainError("widths must be a nonempty sequence")
    if np.any(w < 0) or np.any(np.diff(w) > 0):
        raise DomainError("widths must be nonnegative and nonincreasing")
    l = np.arange(1, len(w) + 1)
    f = _f_star(l, gamma_over_d, log_factor)
    bound = np.maximum.accumulate(f * w) / f
    c = doubling_constant(gamma_over_d, log_factor, jmax=max(2, int(math.log2(len(w))) + 1))
    meta = {"constant": 1, "doubling_constant": c, "log_factor": log_factor}
    return [
        BoundReport("upper-carl", int(i), float(b), {"gamma_over_d": gamma_over_d}, dict(meta))
        for i, b in zip(l, bound)
    ]
