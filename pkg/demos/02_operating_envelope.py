"""
Where can the film operate?
===========================

Three failure modes bound the useful (pre-stretch, actuation stretch)
plane. The material yields once the area expansion limit is reached,
the dielectric breaks down when the field exceeds k_bd / thickness, and
under voltage control a soft film can lose equilibrium (pull-in).
"""

import numpy as np

from elastoharvest.failure import envelope_grid, mechanical_limit, pullin_point
from elastoharvest.material import default_material
from elastoharvest.membrane import MembraneGeometry

mat = default_material()
geom = MembraneGeometry(1e-2, 1e-2, 1e-3)

for lam_p in (3.0, 4.0, 5.0):
    print(f"lam_p = {lam_p}: largest actuation stretch {mechanical_limit(mat, lam_p):.3f}")

# %% Pull-in only threatens lightly pre-stretched films
for lam_p in (1.0, 2.0, 3.0, 4.0):
    pi = pullin_point(mat, geom, lam_p)
    text = f"{pi.voltage / 1e3:.1f} kV at lambda = {pi.stretch:.3f}" if pi.exists else "none below yield"
    print(f"lam_p = {lam_p}: pull-in {text}")

# %% Rasterized envelope
env = envelope_grid(mat, geom, (1.0, 6.0), (1.0, 6.0), resolution=26, workers=4)
print("cell verdicts:", env.counts())
codes = {"feasible": ".", "yield": "#", "breakdown": "b", "pull_in": "p"}
for j in reversed(range(env.lam_act.size)):
    row = "".join(codes[v] for v in env.verdicts[:, j])
    print(f"{env.lam_act[j]:5.2f} {row}")
print("      lam_p from 1 (left) to 6 (right)")
print("breakdown boundary samples:", np.round(env.breakdown_boundary[:3], 3).tolist())
