"""Bilinear covariants of a few spinors and the Fierz aggregate identities.

Run:  python demos/01_bilinears_fierz.py
"""

import numpy as np

from rimspinor.bilinears import aggregate_Z, compute_bilinears, fierz_residuals, fpk_defect
from rimspinor.clifford import build_gamma_basis, dirac_adjoint

basis = build_gamma_basis("standard-Dirac")
print("gamma5 = c * gamma_0123 with c =", basis.g5_per_g0123)

# a spinor at rest: only A and J_0 survive among the scalars and the vector
b = compute_bilinears([1, 0, 0, 0], basis)
print("rest frame  A =", b.A, " B =", b.B, " J =", b.J, " K =", b.K)

# a random spinor; the aggregate Z reproduces 4 psi psibar
rng = np.random.default_rng(0)
psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
b = compute_bilinears(psi, basis)
Z = aggregate_Z(b, basis)
print("|Z - 4 psi psibar|_max =", np.abs(Z - 4 * np.outer(psi, dirac_adjoint(psi, basis))).max())
print("J^2 - A^2 - B^2 (normalised) =", fpk_defect(b))

# the five identities on a batch
batch = rng.standard_normal((10_000, 4)) + 1j * rng.standard_normal((10_000, 4))
res = fierz_residuals(batch, basis).residuals
for name, r in zip(["Z^2", "Z g Z", "Z i g_mn Z", "Z g0123 Z", "Z i g0123 g Z"], res.max(axis=0)):
    print(f"  worst residual of {name:<14s} {r:.2e}")
