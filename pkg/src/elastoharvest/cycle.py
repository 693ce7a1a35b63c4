"""
Quasi-static five-phase scavenging cycle and its energy ledger.

Phases (index: transition):

    0: 0->1  pre-stretch the film to lam_p (no voltage)
    1: 1->2  stretch to lam_max, mechanically or by an actuation voltage
    2: 2->3  apply the poling voltage at lam_max
    3: 3->4  active phase: the film relaxes under the poling load
    4: 4->1  disconnect and return to lam_p

Two charge strategies are supported. In constant-voltage mode the source
stays connected through the active phase and the harvested energy is
0.5 (C_max - C_min) V**2. In constant-charge mode the film is isolated
after poling, its voltage rises from V to Q / C_min, and the harvested
energy is 0.5 Q (V_max - V_min).
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .errors import ConfigError, DomainError, InfeasibleDesignError
from .failure import (
    DEFAULT_K_BD,
    DesignPoint,
    Verdict,
    breakdown_field,
    classify,
    equilibrium_stretch,
)
from .material import relaxed_coefficients
from .membrane import capacitance, leakage_resistance, thickness_at

__all__ = [
    "CycleMode",
    "PHASES",
    "CycleSpec",
    "PhaseState",
    "CycleResult",
    "constant_voltage_energy",
    "produced_energy",
    "textbook_cycle_energy",
    "conduction_loss",
    "energy_density",
    "run_quasistatic_cycle",
]

PHASES = ("0-1 prestretch", "1-2 stretch", "2-3 poling", "3-4 active", "4-1 return")


class CycleMode(str, Enum):
    CONSTANT_VOLTAGE = "constant_voltage"
    CONSTANT_CHARGE = "constant_charge"


@dataclass(frozen=True)
class CycleSpec:
    """Definition of one scavenging cycle.

    ``poling_voltage`` overrides ``design.e_field`` (which is the poling
    field at the lam_max thickness). When ``actuation_voltage`` is set the
    stretch of phase 1->2 is produced electrically and ``design.lam_act``
    is replaced by the resulting equilibrium.
    """

    design: DesignPoint
    mode: CycleMode = CycleMode.CONSTANT_VOLTAGE
    poling_voltage: float = None
    phase_durations: tuple = (1.0, 1.0, 1.0, 1.0, 1.0)
    include_viscoelasticity: bool = False
    actuation_voltage: float = None

    def __post_init__(self):
        object.__setattr__(self, "mode", CycleMode(self.mode))
        durations = tuple(float(d) for d in self.phase_durations)
        if len(durations) != 5:
            raise ConfigError("phase_durations needs exactly five entries")
        if any(d < 0 for d in durations):
            raise ConfigError("phase durations must be non-negative")
        object.__setattr__(self, "phase_durations", durations)
        if self.poling_voltage is not None and self.poling_voltage < 0:
            raise DomainError("poling voltage must be non-negative")
        if self.actuation_voltage is not None and self.actuation_voltage < 0:
            raise DomainError("actuation voltage must be non-negative")


@dataclass(frozen=True)
class PhaseState:
    """Film state at the end of a phase."""

    phase: str
    lam: float
    thickness: float
    capacitance: float
    voltage: float
    e_field: float


@dataclass(frozen=True)
class CycleResult:
    c_max: float
    c_min: float
    v_max: float
    v_min: float
    produced: float
    conduction_loss: float
    net: float
    energy_density: float
    design: DesignPoint = None
    lam_min: float = None
    phases: tuple = ()
    warnings: tuple = field(default_factory=tuple)


def constant_voltage_energy(c_max, c_min, v):
    """0.5 (C_max - C_min) V**2: energy moved to a fixed-voltage source."""
    return 0.5 * (c_max - c_min) * v * v


def textbook_cycle_energy(c_max, c_min, v_max, v_min):
    """The textbook form 0.5 (C_max V_min**2 - C_min V_max**2), kept for traceability.

    It changes sign between charge strategies; use :func:`produced_energy`.
    """
    return 0.5 * (c_max * v_min**2 - c_min * v_max**2)


def produced_energy(c_max, c_min, v_max, v_min, rtol=1e-9):
    """Electrical energy produced over one cycle (J).

    Equal voltage levels select the constant-voltage ledger. Otherwise the
    levels must satisfy charge conservation C_max V_min = C_min V_max and
    the constant-charge ledger 0.5 Q (V_max - V_min) is used.
    """
    if c_max <= 0 or c_min <= 0:
        raise DomainError("capacitances must be positive")
    if v_max < 0 or v_min < 0:
        raise DomainError("voltages must be non-negative")
    if v_max == v_min:
        return constant_voltage_energy(c_max, c_min, v_max)
    q = c_max * v_min
    if not math.isclose(q, c_min * v_max, rel_tol=rtol):
        raise DomainError("unequal voltage levels must conserve charge (C_max V_min = C_min V_max)")
    return 0.5 * q * (v_max - v_min)


def conduction_loss(voltages, resistances, durations):
    """Leakage energy sum(V**2 / R_p * t) over a piecewise-constant schedule."""
    voltages = np.asarray(voltages, dtype=float)
    resistances = np.asarray(resistances, dtype=float)
    durations = np.asarray(durations, dtype=float)
    if not voltages.shape == resistances.shape == durations.shape:
        raise ConfigError("voltage, resistance and duration schedules must have equal length")
    if np.any(resistances <= 0) or np.any(durations < 0):
        raise DomainError("resistances must be positive and durations non-negative")
    return float(np.sum(voltages**2 / resistances * durations))


def energy_density(net, mass):
    if mass <= 0:
        raise DomainError("mass must be positive")
    return net / mass


def _equilibrium(mat, geom, lam_ref, coeffs, **load):
    lam = equilibrium_stretch(coeffs, geom, mat.rel_permittivity, lam_ref, mat.yield_stretch, **load)
    return lam


def run_quasistatic_cycle(mat, geom, spec, k_bd=DEFAULT_K_BD):
    """Simulate one quasi-static cycle and return its energy ledger.

    Without viscoelasticity the film swings between lam_max = lam_p *
    lam_act and lam_min = lam_p. With it, the relaxed coefficients at the
    end of the active phase let the film creep under the poling load, so
    lam_min moves up by the creep of the equilibrium stretch, and an
    electrically driven actuation creeps over its phase as well.
    """
    durations = spec.phase_durations
    design = spec.design
    lam_p = design.lam_p
    warnings = []
    eps_r = mat.rel_permittivity

    if spec.actuation_voltage is not None:
        t_act = durations[1] if spec.include_viscoelasticity else 0.0
        coeffs = relaxed_coefficients(mat, t_act)
        lam_max = _equilibrium(mat, geom, lam_p, coeffs, voltage=spec.actuation_voltage)
        if lam_max is None:
            raise InfeasibleDesignError(
                f"actuation voltage {spec.actuation_voltage:g} V has no equilibrium below yield",
                Verdict.PULL_IN.value)
        lam_act = max(lam_max / lam_p, 1.0)
        act_field = spec.actuation_voltage / thickness_at(geom, lam_max)
        if act_field > breakdown_field(thickness_at(geom, lam_max), k_bd):
            warnings.append(f"actuation field {act_field:.4g} V/m exceeds the breakdown model")
    else:
        lam_act = design.lam_act
        lam_max = lam_p * lam_act

    thk_max = thickness_at(geom, lam_max)
    if spec.poling_voltage is not None:
        v_pole = float(spec.poling_voltage)
    else:
        v_pole = design.e_field * thk_max
    design = DesignPoint(lam_p, lam_act, v_pole / thk_max)

    verdict = classify(mat, geom, design, k_bd, actuation="mechanical")
    if verdict is not Verdict.FEASIBLE:
        raise InfeasibleDesignError(
            f"design (lam_p={lam_p:g}, lam_act={lam_act:g}, E={design.e_field:.4g} V/m) "
            f"violates {verdict.value}", verdict.value)

    c_max = capacitance(geom, eps_r, lam_max)
    lam_min = lam_p
    if spec.include_viscoelasticity and v_pole > 0 and mat.prony:
        if spec.mode is CycleMode.CONSTANT_VOLTAGE:
            load = dict(voltage=v_pole)
        else:
            load = dict(charge=c_max * v_pole)
        relaxed = relaxed_coefficients(mat, durations[3])
        lam_inst = _equilibrium(mat, geom, lam_p, mat.yeoh0, **load)
        lam_relax = _equilibrium(mat, geom, lam_p, relaxed, **load)
        if lam_inst is None or lam_relax is None:
            raise InfeasibleDesignError("poling load loses equilibrium after relaxation",
                                        Verdict.PULL_IN.value)
        lam_min = min(lam_p + max(lam_relax - lam_inst, 0.0), lam_max)
    c_min = capacitance(geom, eps_r, lam_min)
    thk_min = thickness_at(geom, lam_min)

    if spec.mode is CycleMode.CONSTANT_VOLTAGE:
        v_min = v_max = v_pole
    else:
        v_min = v_pole
        v_max = c_max * v_pole / c_min
        e_end = v_max / thk_min
        if e_end > breakdown_field(thk_min, k_bd) * (1 + 1e-12):
            raise InfeasibleDesignError(
                f"constant-charge voltage rise to {v_max:.4g} V breaks the film down",
                Verdict.BREAKDOWN.value)
    if v_pole > 0:
        produced = produced_energy(c_max, c_min, v_max, v_min)
    else:
        produced = 0.0

    v_act = spec.actuation_voltage or 0.0
    r_p = leakage_resistance(geom, mat.bulk_resistivity, np.array([lam_p, lam_max, lam_max]))
    # worst case per phase: highest voltage over the lowest resistance reached
    loss = conduction_loss(
        [0.0, v_act, v_pole, v_max, 0.0],
        [r_p[0], r_p[1], r_p[2], r_p[2], r_p[0]],
        durations,
    )
    net = produced - loss
    mass = geom.film_mass(mat.density) if mat.density > 0 else geom.mass
    density = energy_density(net, mass) if mass > 0 else math.nan

    def state(name, lam, v):
        thk = thickness_at(geom, lam)
        return PhaseState(name, float(lam), float(thk), float(capacitance(geom, eps_r, lam)),
                          float(v), float(v / thk))

    phases = (
        state("0 reference", 1.0, 0.0),
        state("1 prestretched", lam_p, 0.0),
        state("2 stretched", lam_max, v_act),
        state("3 poled", lam_max, v_pole),
        state("4 relaxed", lam_min, v_max),
    )
    return CycleResult(
        c_max=float(c_max),
        c_min=float(c_min),
        v_max=float(v_max),
        v_min=float(v_min),
        produced=float(produced),
        conduction_loss=float(loss),
        net=float(net),
        energy_density=float(density),
        design=design,
        lam_min=float(lam_min),
        phases=phases,
        warnings=tuple(warnings),
    )
