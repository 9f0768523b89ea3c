"""
Dyadic block allocation and approximation of Sobolev functions
==============================================================

Split the spectrum into blocks whose eigenvalues grow by 2^(2/gamma), keep
all of the first block and geometrically fewer coordinates of the later
ones, and drop the rest. The worst error over sampled ball functions then
decays like budget^(-gamma/d).
"""

import numpy as np

from sew.harmonics import BlockSelection, evaluate_basis, grid_for
from sew.operators import SobolevSpec, sample_sobolev_ball
from sew.spectra import ManifoldModel
from sew.widths import admissible_eps, allocate_ranks, allocation_checks, build_approximant, spectrum_for_allocation

circle, gamma = ManifoldModel("circle"), 2.0
eps = 0.75 * admissible_eps(gamma, 1, 2)

spec = spectrum_for_allocation(circle, 16, gamma, eps)
alloc = allocate_ranks(spec, 16, gamma, 1, 2, eps)
print("boundaries", alloc.boundaries)
print("block dims", alloc.block_dims)
print("ranks     ", alloc.ranks)
print("checks    ", allocation_checks(alloc))

mus, errs = [], []
for N in (8, 16, 32, 64):
    spec = spectrum_for_allocation(circle, N, gamma, eps)
    alloc = allocate_ranks(spec, N, gamma, 1, 2, eps)
    sel = BlockSelection.contiguous(spec, 1, 4 * N)
    basis = evaluate_basis(circle, sel, grid_for(sel))
    f = sample_sobolev_ball(SobolevSpec(gamma, 2.0, spec), basis, 100, seed=N)
    err = np.linalg.norm(f - build_approximant(f, alloc), axis=1).max()
    mus.append(alloc.mu)
    errs.append(err)
    print(f"N={N:3d}  mu={alloc.mu:4d}  sup L2 error={err:.3e}")

print("fitted slope", np.polyfit(np.log(mus), np.log(errs), 1)[0], "(target -2)")
