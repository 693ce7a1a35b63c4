"""
Hyperelastic and viscoelastic film model
========================================

The film is described by a Yeoh strain energy whose coefficients relax
in time through a Prony series. This script walks through the shipped
(illustrative) parameter set.
"""

import numpy as np

from elastoharvest.material import (
    cauchy_stress_equibiaxial,
    default_material,
    relaxation_factor,
    relaxed_coefficients,
)

mat = default_material()
print("instantaneous Yeoh coefficients (Pa):", mat.yeoh0)
print("yield stretch from the area limit:", mat.yield_stretch)

# %% Equibiaxial Cauchy stress over the working range of stretch
lam = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
sigma = cauchy_stress_equibiaxial(mat.yeoh0, lam)
for l, s in zip(lam, sigma):
    print(f"lambda = {l:.1f}   sigma = {s / 1e6:8.3f} MPa")

# %% Stress relaxation: every coefficient is scaled by the same factor
for t in (0.0, 0.5, 5.0, 60.0, 1e4):
    print(f"t = {t:>7g} s   phi = {relaxation_factor(mat.prony, t):.4f}")

# Holding the film at lambda = 4 for ten seconds
s0 = cauchy_stress_equibiaxial(mat.yeoh0, 4.0)
s10 = cauchy_stress_equibiaxial(relaxed_coefficients(mat, 10.0), 4.0)
print(f"stress at lambda = 4 drops from {s0 / 1e6:.3f} to {s10 / 1e6:.3f} MPa after 10 s")
