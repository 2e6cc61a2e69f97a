"""Sampling and classifying representatives of the six spinor classes.

Run:  python demos/02_lounesto.py
"""

import numpy as np

from rimspinor.bilinears import compute_bilinears
from rimspinor.clifford import build_gamma_basis, random_spinors
from rimspinor.lounesto import classify_many, classify_spinor, sample_class

basis = build_gamma_basis("chiral")

for label in range(1, 7):
    psi = sample_class(label, seed=label, basis=basis)
    rep = classify_spinor(psi, basis)
    mags = ", ".join(f"|{k}|={v:.2g}" for k, v in rep.magnitudes.items())
    print(f"class {label}: classified as {rep.lounesto_class.label}  ({mags})")

# a generic spinor is regular with A and B both nonzero
psis = random_spinors(np.random.default_rng(1), 100_000)
labels = classify_many(compute_bilinears(psis, basis))
print("class counts over 1e5 Gaussian spinors:", {int(k): int(v) for k, v in zip(*np.unique(labels, return_counts=True))})
