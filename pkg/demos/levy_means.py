"""
Levy means of L_p norms on trigonometric polynomials
====================================================

Average ||sum a_j e_j||_p over the unit sphere of coefficients. For finite p
the average stays of order sqrt(p); for p = inf it grows like sqrt(log n).
"""

import math

from sew.harmonics import evaluate_basis, grid_for, lowest_selection
from sew.norms import DualNorm, InducedNorm, levy_mean
from sew.spectra import ManifoldModel, spectrum

circle = ManifoldModel("circle")

print(f"{'n':>5} " + " ".join(f"{'p=' + str(p):>9}" for p in (2, 4, 16, "inf")) + f" {'sqrt(2 log n)':>14}")
for n in (8, 32, 128):
    sel = lowest_selection(spectrum(circle, n), n)
    basis = evaluate_basis(circle, sel, grid_for(sel))
    row = [levy_mean(InducedNorm(basis, p), 20_000, seed=1).mean for p in (2, 4, 16, math.inf)]
    print(f"{n:>5} " + " ".join(f"{m:9.4f}" for m in row) + f" {math.sqrt(2 * math.log(n)):14.4f}")

# Dual norms need an optimization per sample, so fewer samples here.
sel = lowest_selection(spectrum(circle, 16), 16)
nm = InducedNorm(evaluate_basis(circle, sel, grid_for(sel)), 4)
m, md = levy_mean(nm, 5000, 2), levy_mean(DualNorm(nm), 1000, 2)
print(f"n=16, p=4: M = {m.mean:.4f}, M_dual = {md.mean:.4f}, product = {m.mean * md.mean:.4f} (>= 1)")
