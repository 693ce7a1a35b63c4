"""
Identifying material parameters from test curves
================================================

Yeoh coefficients come from one linear least-squares solve on a tensile
curve. Prony terms come from a separable fit of a relaxation curve.
"""

from dataclasses import replace
from pathlib import Path

from elastoharvest.fitting import fit_prony, fit_yeoh, read_curve_csv
from elastoharvest.material import default_material, dump_material

data = Path(__file__).resolve().parents[1] / "configs" / "data"
tensile = read_curve_csv(data / "equibiaxial_tensile.csv")
relax = read_curve_csv(data / "stress_relaxation.csv")

yeoh = fit_yeoh(tensile, "equibiaxial")
print("fitted Yeoh:", yeoh.coefficients, f"relative residual {yeoh.relative_residual:.3%}")

fits = {}
for n in (1, 2):
    fit = fits[n] = fit_prony(relax, n)
    terms = ", ".join(f"g={p.g:.3f} tau={p.tau:.3g}s" for p in fit.terms)
    print(f"{n} Prony term(s): {terms}  residual {fit.relative_residual:.2%}")

mat = replace(default_material().with_yeoh(yeoh.coefficients), prony=fits[2].terms)
print(dump_material(mat, header="fitted from the shipped synthetic curves"))
