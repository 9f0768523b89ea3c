"""
Harmonics, kernels and the Nikolskii ratio
==========================================

Build the lowest eigenspaces of the Laplacian on the 2-sphere, check that
the kernel of the projection onto them is constant on the diagonal, and
watch the sup/L2 ratio of that kernel hit sqrt(n) exactly.
"""

import math

import numpy as np

from sew.harmonics import BlockSelection, basis_values, evaluate_basis, grid_for, kernel_matrix, random_points
from sew.spectra import ManifoldModel, spectrum

sphere = ManifoldModel("sphere", 2)
spec = spectrum(sphere, 6)
print("eigenvalues  ", spec.eigenvalues.tolist())
print("multiplicity ", spec.multiplicities.tolist())

# %%
# Addition formula: the squared basis functions of one eigenspace sum to its
# dimension at every point, whatever orthonormal basis is used.
pts = random_points(sphere, 500, np.random.default_rng(0))
for k in range(4):
    v = basis_values(BlockSelection.from_spectrum(spec, [k]), pts)
    s = (v ** 2).sum(axis=0)
    print(f"k={k}: sum |Y|^2 in [{s.min():.12f}, {s.max():.12f}]  (dim {spec.multiplicities[k]})")

# %%
# The reproducing kernel of T_4 = H_0 + ... + H_4 has K(x, x) = 25 and its
# section K(x0, .) is the extremal function for the (inf, 2) Nikolskii ratio.
sel = BlockSelection.contiguous(spec, 0, 4)
basis = evaluate_basis(sphere, sel, grid_for(sel))
x0 = pts[:1]
section = (basis.at(x0).T @ basis.table)[0]
l2 = math.sqrt(np.dot(basis.grid.weights, section ** 2))
diag = float(kernel_matrix(basis, x0, x0)[0, 0])
# the sup of the section sits at x0 itself, which is not a grid node
sup = max(diag, float(np.max(np.abs(section))))
print("K(x0,x0) =", diag)
print("sup / L2 =", sup / l2, " sqrt(n) =", math.sqrt(sel.n))
