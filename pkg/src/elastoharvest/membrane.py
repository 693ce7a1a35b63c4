"""
Geometry and electrostatics of a square equibiaxial membrane.

Dimensions are stored in the unstretched reference state. A total
in-plane stretch ``lam`` scales the sides by ``lam`` and the thickness
by ``lam**-2`` so the volume is conserved.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import ConfigError, DomainError
from .material import EPSILON_0

__all__ = [
    "MembraneGeometry",
    "StretchState",
    "maxwell_stress",
    "thickness_at",
    "area_at",
    "capacitance",
    "leakage_resistance",
    "field_from_voltage",
    "geometry_from_dict",
]

GEOMETRY_KEYS = ("x10_m", "x20_m", "x30_m", "mass_kg")


@dataclass(frozen=True)
class MembraneGeometry:
    """Reference dimensions x10, x20 (in-plane), x30 (thickness) in m and lumped mass in kg."""

    x10: float
    x20: float
    x30: float
    mass: float = 0.0

    def __post_init__(self):
        if min(self.x10, self.x20, self.x30) <= 0:
            raise DomainError("membrane dimensions must be positive")
        if self.mass < 0:
            raise DomainError("membrane mass must be non-negative")

    @property
    def volume(self):
        return self.x10 * self.x20 * self.x30

    def film_mass(self, density):
        return density * self.volume


@dataclass(frozen=True)
class StretchState:
    lam_p: float
    lam_act: float = 1.0

    def __post_init__(self):
        if self.lam_p <= 0 or self.lam_act <= 0:
            raise DomainError("stretch ratios must be positive")

    @property
    def lam_total(self):
        return self.lam_p * self.lam_act

    @property
    def lam_max(self):
        return self.lam_total

    @property
    def lam_min(self):
        return self.lam_p

    @property
    def thickness_stretch(self):
        return self.lam_total**-2


def _positive(name, value):
    if np.any(np.asarray(value) <= 0):
        raise DomainError(f"{name} must be positive, got {value}")


def _out(x):
    return x if np.ndim(x) else float(x)


def maxwell_stress(rel_permittivity, e_field):
    """Electrostatic pressure eps0 * eps_r * E**2 (Pa)."""
    e_field = np.asarray(e_field, dtype=float)
    if np.any(e_field < 0):
        raise DomainError("electric field magnitude must be non-negative")
    return _out(EPSILON_0 * rel_permittivity * e_field**2)


def thickness_at(geom, lam_total):
    _positive("stretch", lam_total)
    return _out(geom.x30 / np.asarray(lam_total, dtype=float) ** 2)


def area_at(geom, lam_total):
    _positive("stretch", lam_total)
    return _out(geom.x10 * geom.x20 * np.asarray(lam_total, dtype=float) ** 2)


def capacitance(geom, rel_permittivity, lam_total):
    """Parallel-plate capacitance eps0 eps_r x10 x20 lam^4 / x30 (F)."""
    _positive("stretch", lam_total)
    lam = np.asarray(lam_total, dtype=float)
    return _out(EPSILON_0 * rel_permittivity * geom.x10 * geom.x20 * lam**4 / geom.x30)


def leakage_resistance(geom, bulk_resistivity, lam_total):
    """Through-thickness resistance rho * thickness / area = rho x30 / (x10 x20 lam^4) (Ohm).

    Its product with :func:`capacitance` is rho eps0 eps_r for any geometry.
    """
    _positive("stretch", lam_total)
    _positive("bulk resistivity", bulk_resistivity)
    lam = np.asarray(lam_total, dtype=float)
    return _out(bulk_resistivity * geom.x30 / (geom.x10 * geom.x20 * lam**4))


def field_from_voltage(v, thickness):
    _positive("thickness", thickness)
    return _out(np.asarray(v, dtype=float) / thickness)


def geometry_from_dict(data, source="geometry"):
    errors = []
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: expected a mapping")
    for key in data:
        if key not in GEOMETRY_KEYS:
            errors.append(f"{source}: unknown key '{key}'")
    values = {}
    for key in GEOMETRY_KEYS:
        if key not in data:
            if key == "mass_kg":
                values[key] = 0.0
                continue
            errors.append(f"{source}: missing key '{key}'")
            continue
        try:
            values[key] = float(data[key])
        except (TypeError, ValueError):
            errors.append(f"{source}.{key}: expected a number")
            continue
        if not math.isfinite(values[key]):
            errors.append(f"{source}.{key}: must be finite")
        elif key == "mass_kg" and values[key] < 0:
            errors.append(f"{source}.{key}: must be non-negative, got {values[key]}")
        elif key != "mass_kg" and values[key] <= 0:
            errors.append(f"{source}.{key}: must be positive, got {values[key]}")
    if errors:
        raise ConfigError(errors)
    return MembraneGeometry(values["x10_m"], values["x20_m"], values["x30_m"], values["mass_kg"])
