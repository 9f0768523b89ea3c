"""
Entropy numbers: formulas against experiment
============================================

The lower and upper entropy estimates for Sobolev embeddings differ by a
factor that depends on (p, q) but not on n. Below the formulas, then a
small experiment: greedy packings of a two-dimensional diagonal ellipse
never fall below the volumetric lower bound.
"""

import math

import numpy as np

from sew.entropy import body_samples, empirical_covering, entropy_lower_bound, sobolev_entropy_lower, sobolev_entropy_upper
from sew.norms import EuclideanNorm

for p, q in [(2, 2), (2, 4), (1, math.inf)]:
    print(f"p={p}, q={q}")
    for n in (16, 256, 4096):
        lo, up = sobolev_entropy_lower(n, 2, 1, p, q), sobolev_entropy_upper(n, 2, 1, p, q)
        print(f"  n={n:5d}  lower={lo:.3e}  upper={up:.3e}  ratio={up / lo:.4f}")

lam = np.array([1.0, 0.25])
pts = body_samples(EuclideanNorm(2), 20_000, seed=0, linear=lam)
dist = lambda d: np.linalg.norm(d, axis=-1)  # noqa: E731
for k in range(2, 9):
    upper, lower = empirical_covering(pts, dist, k)
    bound = entropy_lower_bound(math.sqrt(lam.prod()), 1.0, 1.0, k, 2)
    print(f"k={k}: packing {lower.radius:.4f} >= bound {bound:.4f}, covering {upper.radius:.4f}")
