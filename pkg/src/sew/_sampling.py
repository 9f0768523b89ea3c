"""Chunked, seed-split Monte Carlo.

Every chunk gets its own child of ``SeedSequence(seed)`` and results are
concatenated in chunk order, so the output does not depend on ``workers``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

CHUNK = 4096


def seed_sequence(seed: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed) % (1 << 64))


def chunk_rngs(seed: int, samples: int, chunk: int = CHUNK):
    sizes = [chunk] * (samples // chunk)
    if samples % chunk:
        sizes.append(samples % chunk)
    children = seed_sequence(seed).spawn(len(sizes))
    return [(size, np.random.default_rng(child)) for size, child in zip(sizes, children)]


def unit_sphere(rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    """Uniform points on ``S^{n-1}``: normalized standard Gaussians."""
    g = rng.standard_normal((size, n))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def run_chunks(task, seed: int, samples: int, workers: int = 1, chunk: int = CHUNK):
    """Evaluate ``task(size, rng)`` per chunk; returns the list of chunk results in order."""
    jobs = chunk_rngs(seed, samples, chunk)
    if workers is None or workers <= 1 or len(jobs) == 1:
        return [task(size, rng) for size, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: task(*job), jobs))


def sphere_values(fn, n: int, seed: int, samples: int, workers: int = 1) -> np.ndarray:
    """``fn`` applied to ``samples`` uniform points of ``S^{n-1}``, in sampling order."""
    parts = run_chunks(lambda size, rng: np.asarray(fn(unit_sphere(rng, size, n))), seed, samples, workers)
    return np.concatenate(parts)
