"""
Norms induced on coefficient space by L_p norms of harmonic polynomials, their
duals, and Monte Carlo Levy means (averages over the Euclidean unit sphere).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import _sampling
from .errors import ConvergenceError, DomainError
from .harmonics import BasisSlice, lp_norm

__all__ = [
    "InducedNorm",
    "DualNorm",
    "EuclideanNorm",
    "LevyEstimate",
    "conjugate",
    "induced_norm",
    "dual_norm",
    "dual_norms",
    "levy_mean",
]


def conjugate(p: float) -> float:
    """Hölder conjugate exponent ``p' = p / (p - 1)``."""
    p = float(p)
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True, eq=False)
class InducedNorm:
    """``||alpha||* = || sum_i alpha_i eta_i ||_{L_p}`` evaluated by quadrature."""

    basis: BasisSlice
    p: float

    def __post_init__(self):
        if not float(self.p) >= 1:
            raise DomainError(f"p must be >= 1, got {self.p}")

    @property
    def n(self) -> int:
        return self.basis.n

    def __call__(self, alpha):
        alpha = np.asarray(alpha, dtype=np.float64)
        if alpha.shape[-1] != self.n:
            raise DomainError(f"coefficient length {alpha.shape[-1]} != n={self.n}")
        return lp_norm(self.basis.synthesize(alpha), self.basis.grid, self.p)


@dataclass(frozen=True, eq=False)
class EuclideanNorm:
    n: int

    def __call__(self, alpha):
        return np.linalg.norm(np.asarray(alpha, dtype=np.float64), axis=-1)


def induced_norm(alpha, nm: InducedNorm) -> float:
    return float(nm(alpha))


@dataclass(frozen=True, eq=False)
class DualNorm:
    """``sup { <alpha, beta> : ||beta||* <= 1 }`` for an :class:`InducedNorm`."""

    primal: InducedNorm
    tol: float = 1e-9
    restarts: int = 1

    @property
    def n(self) -> int:
        return self.primal.n

    def __call__(self, alpha):
        alpha = np.asarray(alpha, dtype=np.float64)
        out = dual_norms(np.atleast_2d(alpha), self.primal, self.tol, self.restarts)
        return out if alpha.ndim > 1 else out[0]


def _lp_dual(alpha, nm):
    # p in {1, inf}: the unit ball is a polytope, solve the LP exactly
    table = nm.basis.table
    w = nm.basis.grid.weights
    n, npts = table.shape
    if math.isinf(float(nm.p)):
        a_ub = np.vstack([table.T, -table.T])
        b_ub = np.ones(2 * npts)
        res = linprog(-alpha, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * n, method="highs")
        beta = res.x
    else:
        eye = np.eye(npts)
        a_ub = np.vstack([
            np.hstack([table.T, -eye]),
            np.hstack([-table.T, -eye]),
            np.concatenate([np.zeros(n), w])[None, :],
        ])
        b_ub = np.concatenate([np.zeros(2 * npts), [1.0]])
        c = np.concatenate([-alpha, np.zeros(npts)])
        bounds = [(None, None)] * n + [(0, None)] * npts
        res = linprog(c, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
        beta = res.x[:n]
    if res.status != 0:
        raise ConvergenceError(f"LP for the dual norm failed: {res.message}", best=float(alpha @ alpha) / float(nm(alpha)))
    return float(alpha @ beta)


def _ratio_and_grad(alpha, beta, table, w, p):
    v = beta @ table
    av = np.abs(v)
    top = av.max(axis=1, keepdims=True)
    top = np.where(top > 0, top, 1.0)
    u = av / top
    s = (u ** p) @ w
    norm = top[:, 0] * s ** (1.0 / p)
    # gradient of the norm, scaled so large p stays finite
    gn = ((u ** (p - 1.0)) * np.sign(v) * w) @ table.T / (s ** ((p - 1.0) / p))[:, None]
    h = np.einsum("ij,ij->i", alpha, beta) / norm
    g = (alpha - h[:, None] * gn) / norm[:, None]
    return h, g


def _ascent(alpha, beta, nm, tol, max_iter):
    table = nm.basis.table
    w = nm.basis.grid.weights
    p = float(nm.p)
    beta = beta / np.linalg.norm(beta, axis=1, keepdims=True)
    h, g = _ratio_and_grad(alpha, beta, table, w, p)
    step = np.full(len(h), 0.5)
    scale = np.maximum(np.abs(h), 1e-300)
    done = np.linalg.norm(g, axis=1) <= tol * scale
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        ga = g[act]
        gn = np.linalg.norm(ga, axis=1, keepdims=True)
        b_new = beta[act] + step[act, None] * ga / np.where(gn > 0, gn, 1.0)
        b_new /= np.linalg.norm(b_new, axis=1, keepdims=True)
        h_new, g_new = _ratio_and_grad(alpha[act], b_new, table, w, p)
        ok = h_new >= h[act]
        idx = act[ok]
        beta[idx], h[idx], g[idx] = b_new[ok], h_new[ok], g_new[ok]
        step[idx] *= 1.5
        step[act[~ok]] *= 0.3
        gnorm = np.linalg.norm(g[act], axis=1)
        done[act] = (gnorm <= tol * scale[act]) | (step[act] < 1e-15)
    return h, done, beta


def _certificate(alpha, beta, nm):
    # any g on the grid whose coefficients equal alpha bounds the dual by ||g||_{p'};
    # built from beta it is tight at the maximizer
    table = nm.basis.table
    p = float(nm.p)
    v = beta @ table
    nv = lp_norm(v, nm.basis.grid, p)
    g0 = np.abs(v / nv[:, None]) ** (p - 1.0) * np.sign(v)
    c = (g0 * nm.basis.grid.weights) @ table.T
    h = np.einsum("ij,ij->i", alpha, beta) / nv
    g = h[:, None] * g0 + (alpha - h[:, None] * c) @ table
    return h, lp_norm(g, nm.basis.grid, conjugate(p))


def _irls(alpha, nm, tol, max_iter):
    # minimise sum w |J beta|^p subject to <alpha, beta> = 1 by reweighted least squares
    table = nm.basis.table
    w = nm.basis.grid.weights
    p = float(nm.p)
    m = len(alpha)
    beta = alpha.copy()
    h = np.full(m, -np.inf)
    step = np.full(m, np.inf)
    done = np.zeros(m, dtype=bool)
    for _ in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        v = beta[act] @ table
        top = np.abs(v).max(axis=1, keepdims=True)
        r = np.maximum(np.abs(v) / top, 1e-14) ** (p - 2.0)
        gram = (table[None] * (r * w)[:, None, :]) @ table.T
        b = np.linalg.solve(gram, alpha[act][:, :, None])[:, :, 0]
        b /= np.linalg.norm(b, axis=1, keepdims=True)
        h_new = np.einsum("ij,ij->i", alpha[act], b) / nm(b)
        gain = h_new - h[act]
        up = gain > 0
        beta[act[up]], h[act[up]] = b[up], h_new[up]
        # linear convergence: remaining error ~ gain * rate / (1 - rate)
        prev = step[act]
        known = np.isfinite(prev) & (prev > 0) & np.isfinite(gain)
        rate = np.ones_like(gain)
        rate[known] = np.clip(gain[known] / prev[known], 0, None)
        tail = np.where(rate < 1, gain * rate / np.maximum(1 - rate, 1e-300), np.inf)
        step[act] = gain
        small = ~up | (tail <= tol * np.abs(h[act]))
        if np.any(small):
            idx = act[small]
            hc, upper = _certificate(alpha[idx], beta[idx], nm)
            done[idx] = (upper - hc <= tol * upper) | ~up[small] | (tail[small] <= tol * np.abs(h[idx]))
    return h, done


def dual_norms(alphas, nm: InducedNorm, tol: float = 1e-9, restarts: int = 1, max_iter: int = 10_000) -> np.ndarray:
    """Dual of the induced ``L_p`` norm for each row of ``alphas``.

    ``2 < p < inf``: normalized gradient ascent of ``<alpha, beta> / ||beta||*``
    over the unit sphere. The first start is the coefficient vector of
    ``|f|^{p'-1} sign f`` (``f = J alpha``), the exact maximizer before projecting
    onto the span; further restarts are random. A linear objective over a convex
    body has no spurious local maxima, so restarts only guard against stalls.
    ``1 < p < 2``: iteratively reweighted least squares for the equivalent
    ``min ||J beta||_p`` on ``<alpha, beta> = 1``, which stays fast as ``p -> 1``.
    ``p = 2``: inverse Gram matrix. ``p in {1, inf}``: exact linear program.
    """
    if tol <= 0:
        raise DomainError("tol must be positive")
    alphas = np.atleast_2d(np.asarray(alphas, dtype=np.float64))
    if alphas.shape[1] != nm.n:
        raise DomainError(f"coefficient length {alphas.shape[1]} != n={nm.n}")
    p = float(nm.p)
    if p == 2.0:
        return _l2_dual(alphas, nm)
    if p == 1.0 or math.isinf(p):
        return np.array([_lp_dual(a, nm) for a in alphas])
    table = nm.basis.table
    w = nm.basis.grid.weights
    q = conjugate(p)
    v = alphas @ table
    zero_rows = ~np.any(alphas, axis=1)
    best = np.zeros(len(alphas))
    converged = np.ones(len(alphas), dtype=bool)
    live = np.flatnonzero(~zero_rows)
    a = alphas[live]
    if p < 2.0:
        best[live], converged[live] = _irls(a, nm, tol, min(max_iter, 2000))
    elif live.size:
        starts = [((np.abs(v[live]) ** (q - 1.0)) * np.sign(v[live]) * w) @ table.T]
        rng = np.random.default_rng(12345)
        for _ in range(max(restarts, 1) - 1):
            starts.append(rng.standard_normal(a.shape))
        top = np.full(len(live), -np.inf)
        ok = np.zeros(len(live), dtype=bool)
        for beta0 in starts:
            h, done, _ = _ascent(a, beta0.copy(), nm, tol, max_iter)
            top = np.where(h > top, h, top)
            ok |= done
        best[live], converged[live] = top, ok
    if not np.all(converged):
        raise ConvergenceError("dual-norm iteration hit the iteration cap", best=best)
    holder = lp_norm(v, nm.basis.grid, q)
    if np.any(best > holder * (1 + 1e-9) + 1e-15):
        raise ConvergenceError("dual value exceeds the Hölder ceiling", best=best)
    return best


def _l2_dual(alphas, nm):
    # self-dual up to the (exact) Gram matrix of the quadrature
    gram = nm.basis.gram()
    return np.sqrt(np.einsum("ij,jk,ik->i", alphas, np.linalg.inv(gram), alphas))


def dual_norm(alpha, nm: InducedNorm, tol: float = 1e-9, restarts: int = 8) -> float:
    """Dual norm of a single vector (8 restarts by default)."""
    return float(dual_norms(np.atleast_2d(alpha), nm, tol, restarts)[0])


@dataclass(frozen=True)
class LevyEstimate:
    """Monte Carlo mean with standard error ``std / sqrt(samples)``."""

    mean: float
    stderr: float
    samples: int
    seed: int

    @classmethod
    def from_values(cls, values, seed):
        values = np.asarray(values, dtype=np.float64)
        m = len(values)
        sd = float(np.std(values, ddof=1)) if m > 1 else 0.0
        return cls(float(np.mean(values)), sd / math.sqrt(m), m, int(seed))


def levy_mean(norm, samples: int, seed: int, workers: int = 1) -> LevyEstimate:
    """Average of ``norm`` over ``samples`` uniform points of ``S^{n-1}``.

    ``norm`` is any callable on ``(S, n)`` batches with an ``n`` attribute, e.g.
    :class:`InducedNorm` or :class:`DualNorm`.
    """
    if samples < 100:
        raise DomainError("use at least 100 samples")
    values = _sampling.sphere_values(norm, norm.n, seed, samples, workers)
    return LevyEstimate.from_values(values, seed)
