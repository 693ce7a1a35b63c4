"""
Constitutive law of the elastomer film.

The hyperelastic response follows a Yeoh strain-energy potential

    W = C10 (I1 - 3) + C20 (I1 - 3)^2 + C30 (I1 - 3)^3

whose coefficients relax in time through a Prony series

    C_ij(t) = C_ij0 [1 - sum_k g_k (1 - exp(-t / tau_k))].

Every stretch state used in this package is incompressible and
equibiaxial: lambda1 = lambda2 = lam and lambda3 = lam**-2.
"""

from dataclasses import dataclass, field
from pathlib import Path
import math

import numpy as np
import yaml

from .errors import ConfigError, DomainError

__all__ = [
    "EPSILON_0",
    "YeohCoefficients",
    "PronyTerm",
    "MaterialParams",
    "first_invariant",
    "equibiaxial_stretches",
    "equibiaxial_invariant",
    "relaxation_factor",
    "relaxed_coefficients",
    "strain_energy",
    "strain_energy_slope",
    "equibiaxial_elastic_term",
    "cauchy_stress_equibiaxial",
    "cauchy_stress_uniaxial",
    "load_material",
    "material_from_dict",
    "material_to_dict",
    "dump_material",
    "default_material",
]

EPSILON_0 = 8.854187817e-12  # F/m

MATERIAL_KEYS = (
    "c10_pa",
    "c20_pa",
    "c30_pa",
    "prony",
    "rel_permittivity",
    "density_kg_m3",
    "bulk_resistivity_ohm_m",
    "max_area_expansion",
)

DEFAULT_MATERIAL_FILE = Path(__file__).parent / "data" / "vhb4910_default.yaml"


@dataclass(frozen=True)
class YeohCoefficients:
    c10: float
    c20: float = 0.0
    c30: float = 0.0

    def __post_init__(self):
        values = (self.c10, self.c20, self.c30)
        if not all(math.isfinite(v) for v in values):
            raise DomainError(f"Yeoh coefficients must be finite, got {values}")
        if self.c10 <= 0:
            raise DomainError(f"c10 must be positive, got {self.c10}")

    def scaled(self, factor):
        return YeohCoefficients(self.c10 * factor, self.c20 * factor, self.c30 * factor)

    def as_array(self):
        return np.array([self.c10, self.c20, self.c30])


@dataclass(frozen=True)
class PronyTerm:
    g: float
    tau: float

    def __post_init__(self):
        if not 0.0 <= self.g < 1.0:
            raise DomainError(f"Prony weight must satisfy 0 <= g < 1, got {self.g}")
        if not self.tau > 0.0:
            raise DomainError(f"Prony time constant must be positive, got {self.tau}")


@dataclass(frozen=True)
class MaterialParams:
    """Full constitutive description of the film.

    Parameters
    ----------
    yeoh0 : YeohCoefficients
        Instantaneous (unrelaxed) Yeoh coefficients, Pa.
    prony : tuple of PronyTerm
        Relaxation terms applied identically to all three coefficients.
    rel_permittivity : float
        Relative dielectric constant.
    density : float
        Mass density, kg/m^3.
    bulk_resistivity : float
        Volume resistivity used for leakage, Ohm.m.
    max_area_expansion : float
        Largest admissible area stretch lam**2 before mechanical failure.
    """

    yeoh0: YeohCoefficients
    prony: tuple = field(default_factory=tuple)
    rel_permittivity: float = 4.7
    density: float = 960.0
    bulk_resistivity: float = 1e13
    max_area_expansion: float = 36.0

    def __post_init__(self):
        object.__setattr__(self, "prony", tuple(self.prony))
        if sum(term.g for term in self.prony) >= 1.0:
            raise DomainError("sum of Prony weights must stay below 1")
        if self.rel_permittivity < 1.0:
            raise DomainError(f"rel_permittivity must be >= 1, got {self.rel_permittivity}")
        if self.max_area_expansion <= 1.0:
            raise DomainError("max_area_expansion must exceed 1")
        if self.density < 0 or self.bulk_resistivity <= 0:
            raise DomainError("density must be >= 0 and bulk_resistivity > 0")

    @property
    def yield_stretch(self):
        """Largest in-plane stretch from the reference state."""
        return math.sqrt(self.max_area_expansion)

    @property
    def permittivity(self):
        return EPSILON_0 * self.rel_permittivity

    def with_yeoh(self, coeffs):
        return MaterialParams(coeffs, self.prony, self.rel_permittivity, self.density,
                              self.bulk_resistivity, self.max_area_expansion)

    def without_relaxation(self):
        return MaterialParams(self.yeoh0, (), self.rel_permittivity, self.density,
                              self.bulk_resistivity, self.max_area_expansion)


def _check_positive(name, value):
    if np.any(np.asarray(value) <= 0):
        raise DomainError(f"{name} must be positive")


def first_invariant(l1, l2, l3):
    """Trace of the left Cauchy-Green tensor for principal stretches."""
    for name, v in (("l1", l1), ("l2", l2), ("l3", l3)):
        _check_positive(name, v)
    return np.square(l1) + np.square(l2) + np.square(l3)


def equibiaxial_stretches(lam):
    """Principal stretches (lam, lam, lam**-2) of an incompressible film."""
    _check_positive("stretch", lam)
    lam = np.asarray(lam, dtype=float)
    return lam, lam, 1.0 / (lam * lam)


def equibiaxial_invariant(lam):
    _check_positive("stretch", lam)
    lam = np.asarray(lam, dtype=float)
    return 2.0 * lam**2 + lam**-4


def relaxation_factor(prony, t):
    """Multiplier 1 - sum_k g_k (1 - exp(-t/tau_k)) applied to C_ij0."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError(f"relaxation time must be >= 0, got {t}")
    factor = np.ones_like(t)
    for term in prony:
        factor = factor - term.g * -np.expm1(-t / term.tau)
    return factor if factor.ndim else float(factor)


def relaxed_coefficients(mat, t):
    """Yeoh coefficients after a relaxation time ``t`` measured from load onset."""
    t = float(t)
    if t < 0:
        raise DomainError(f"relaxation time must be >= 0, got {t}")
    if t == 0.0 or not mat.prony:
        return mat.yeoh0
    return mat.yeoh0.scaled(relaxation_factor(mat.prony, t))


def strain_energy(coeffs, i1):
    i1 = np.asarray(i1, dtype=float)
    # tolerance absorbs rounding in 2*lam**2 + lam**-4 near lam = 1
    if np.any(i1 < 3.0 - 1e-12):
        raise DomainError(f"first invariant must be >= 3, got {i1}")
    x = i1 - 3.0
    return coeffs.c10 * x + coeffs.c20 * x**2 + coeffs.c30 * x**3


def strain_energy_slope(coeffs, i1):
    """dW/dI1."""
    x = np.asarray(i1, dtype=float) - 3.0
    return coeffs.c10 + 2.0 * coeffs.c20 * x + 3.0 * coeffs.c30 * x**2


def equibiaxial_elastic_term(coeffs, lam):
    """(lam^2 - lam^-4) [C10 + 2 C20 (I1-3) + 3 C30 (I1-3)^2] under equibiaxial stretch.

    Equal to half the in-plane minus thickness Cauchy stress difference.
    """
    _check_positive("stretch", lam)
    lam = np.asarray(lam, dtype=float)
    inv = 2.0 * lam**2 + lam**-4
    out = (lam**2 - lam**-4) * strain_energy_slope(coeffs, inv)
    return out if out.ndim else float(out)


def cauchy_stress_equibiaxial(coeffs, lam, sigma3=0.0):
    """In-plane Cauchy stress sigma1 = sigma2 of an equibiaxially stretched film.

    The hydrostatic pressure is eliminated by requiring the thickness
    direction to carry ``sigma3``:

        sigma1 = sigma3 + lam1 dW/dlam1 - lam3 dW/dlam3
               = sigma3 + 2 (lam^2 - lam^-4) dW/dI1
    """
    return sigma3 + 2.0 * equibiaxial_elastic_term(coeffs, lam)


def cauchy_stress_uniaxial(coeffs, lam, sigma_lateral=0.0):
    """Axial Cauchy stress under incompressible uniaxial stretch (lam, lam^-1/2, lam^-1/2)."""
    _check_positive("stretch", lam)
    lam = np.asarray(lam, dtype=float)
    inv = lam**2 + 2.0 / lam
    out = sigma_lateral + 2.0 * (lam**2 - 1.0 / lam) * strain_energy_slope(coeffs, inv)
    return out if out.ndim else float(out)


# --- material config files -------------------------------------------------

def material_from_dict(data, source="material"):
    errors = []
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a mapping")
    for key in data:
        if key not in MATERIAL_KEYS:
            errors.append(f"{source}: unknown key '{key}'")
    missing = [key for key in MATERIAL_KEYS if key not in data]
    if missing:
        errors.extend(f"{source}: missing key '{key}'" for key in missing)
        raise ConfigError(errors)

    def number(key):
        try:
            return float(data[key])
        except (TypeError, ValueError):
            errors.append(f"{source}.{key}: expected a number, got {data[key]!r}")
            return float("nan")

    c10, c20, c30 = number("c10_pa"), number("c20_pa"), number("c30_pa")
    eps_r = number("rel_permittivity")
    rho = number("density_kg_m3")
    resistivity = number("bulk_resistivity_ohm_m")
    area = number("max_area_expansion")
    prony = []
    raw_prony = data["prony"] or []
    if not isinstance(raw_prony, list):
        errors.append(f"{source}.prony: expected a list of {{g, tau_s}}")
        raw_prony = []
    for i, item in enumerate(raw_prony):
        if not isinstance(item, dict) or set(item) != {"g", "tau_s"}:
            errors.append(f"{source}.prony[{i}]: expected keys g and tau_s")
            continue
        try:
            prony.append(PronyTerm(float(item["g"]), float(item["tau_s"])))
        except (DomainError, TypeError, ValueError) as exc:
            errors.append(f"{source}.prony[{i}]: {exc}")
    if c10 <= 0:
        errors.append(f"{source}.c10_pa: must be positive")
    if eps_r < 1:
        errors.append(f"{source}.rel_permittivity: must be >= 1")
    if rho < 0:
        errors.append(f"{source}.density_kg_m3: must be non-negative")
    if resistivity <= 0:
        errors.append(f"{source}.bulk_resistivity_ohm_m: must be positive")
    if area <= 1:
        errors.append(f"{source}.max_area_expansion: must exceed 1")
    if sum(p.g for p in prony) >= 1:
        errors.append(f"{source}.prony: weights must sum below 1")
    if errors:
        raise ConfigError(errors)
    return MaterialParams(YeohCoefficients(c10, c20, c30), tuple(prony), eps_r, rho,
                          resistivity, area)


def material_to_dict(mat):
    return {
        "c10_pa": float(mat.yeoh0.c10),
        "c20_pa": float(mat.yeoh0.c20),
        "c30_pa": float(mat.yeoh0.c30),
        "prony": [{"g": float(p.g), "tau_s": float(p.tau)} for p in mat.prony],
        "rel_permittivity": float(mat.rel_permittivity),
        "density_kg_m3": float(mat.density),
        "bulk_resistivity_ohm_m": float(mat.bulk_resistivity),
        "max_area_expansion": float(mat.max_area_expansion),
    }


def load_material(path):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"material file not found: {path}")
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return material_from_dict(data, source=str(path.name))


def dump_material(mat, path=None, header=None):
    text = yaml.safe_dump(material_to_dict(mat), sort_keys=False)
    if header:
        text = "".join(f"# {line}\n" for line in header.splitlines()) + text
    if path is not None:
        Path(path).write_text(text)
    return text


def default_material():
    """The shipped VHB-4910-like parameter set (illustrative, not authoritative)."""
    return load_material(DEFAULT_MATERIAL_FILE)
