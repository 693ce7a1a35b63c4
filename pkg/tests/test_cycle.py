import math

import pytest
from hypothesis import given, settings, strategies as st

from elastoharvest.cycle import (
    CycleMode,
    CycleSpec,
    conduction_loss,
    constant_voltage_energy,
    energy_density,
    textbook_cycle_energy,
    produced_energy,
    run_quasistatic_cycle,
)
from elastoharvest.errors import ConfigError, DomainError, InfeasibleDesignError
from elastoharvest.failure import DesignPoint
from elastoharvest.membrane import capacitance, leakage_resistance


def test_measured_capacitance_energy():
    assert produced_energy(80.2e-12, 66.2e-12, 2e3, 2e3) == pytest.approx(28e-6, rel=1e-3)


@given(
    c_min=st.floats(1e-12, 1e-9),
    ratio=st.floats(1.0, 10.0),
    v=st.floats(1.0, 1e4),
)
@settings(max_examples=80, deadline=None)
def test_constant_charge_equals_stored_energy_change(c_min, ratio, v):
    c_max = c_min * ratio
    q = c_max * v
    v_max = q / c_min
    stored = 0.5 * q * q / c_min - 0.5 * q * q / c_max
    assert produced_energy(c_max, c_min, v_max, v) == pytest.approx(stored, rel=1e-9)


def test_unbalanced_levels_rejected():
    with pytest.raises(DomainError):
        produced_energy(80e-12, 60e-12, 3000.0, 2000.0)


def test_textbook_form_changes_sign():
    # the textbook expression is negative for constant charge
    c_max, c_min, v = 80e-12, 40e-12, 1000.0
    assert textbook_cycle_energy(c_max, c_min, c_max * v / c_min, v) < 0
    assert constant_voltage_energy(c_max, c_min, v) == pytest.approx(0.5 * 40e-12 * 1e6)


def test_conduction_loss():
    assert conduction_loss([1000.0], [1e9], [2.0]) == pytest.approx(2e-3)
    with pytest.raises(ConfigError):
        conduction_loss([1.0, 2.0], [1.0], [1.0])


def test_energy_density():
    assert energy_density(1e-3, 4e-6) == pytest.approx(250.0)
    with pytest.raises(DomainError):
        energy_density(1.0, 0.0)


@pytest.mark.parametrize("mode", list(CycleMode))
@pytest.mark.parametrize("visco", [False, True])
def test_ledger_conservation(mat, ref_geom, mode, visco):
    spec = CycleSpec(DesignPoint(4.0, 1.2, 0.0), mode, poling_voltage=1000.0,
                     include_viscoelasticity=visco)
    r = run_quasistatic_cycle(mat, ref_geom, spec)
    assert r.net == r.produced - r.conduction_loss
    assert r.c_max > r.c_min > 0
    assert r.produced > 0


def test_elastic_cycle_closed_form(mat, ref_geom):
    spec = CycleSpec(DesignPoint(4.0, 1.2, 0.0), CycleMode.CONSTANT_VOLTAGE, poling_voltage=1500.0)
    r = run_quasistatic_cycle(mat, ref_geom, spec)
    c_max = capacitance(ref_geom, 4.7, 4.8)
    c_min = capacitance(ref_geom, 4.7, 4.0)
    assert r.c_max == pytest.approx(c_max, rel=1e-12)
    assert r.c_min == pytest.approx(c_min, rel=1e-12)
    assert r.produced == pytest.approx(0.5 * (c_max - c_min) * 1500.0**2, rel=1e-12)
    r_max = leakage_resistance(ref_geom, mat.bulk_resistivity, 4.8)
    # poling and active phases at 1500 V, worst-case resistance
    assert r.conduction_loss == pytest.approx(2 * 1500.0**2 / r_max, rel=1e-12)


def test_constant_charge_boosts_voltage(mat, ref_geom):
    spec = CycleSpec(DesignPoint(4.0, 1.2, 0.0), CycleMode.CONSTANT_CHARGE, poling_voltage=1000.0)
    r = run_quasistatic_cycle(mat, ref_geom, spec)
    assert r.v_max == pytest.approx(1000.0 * r.c_max / r.c_min, rel=1e-12)
    assert r.v_min == 1000.0


def test_constant_charge_breakdown_at_end(mat, ref_geom):
    # poling just under breakdown at lam_max; the voltage rise then breaks the film
    from elastoharvest.failure import breakdown_field
    from elastoharvest.membrane import thickness_at

    thk = thickness_at(ref_geom, 6.0)
    v = 0.99 * breakdown_field(thk) * thk
    spec = CycleSpec(DesignPoint(4.0, 1.5, 0.0), CycleMode.CONSTANT_CHARGE, poling_voltage=v)
    with pytest.raises(InfeasibleDesignError) as info:
        run_quasistatic_cycle(mat, ref_geom, spec)
    assert info.value.criterion == "breakdown"


def test_yield_violation_rejected(mat, ref_geom):
    spec = CycleSpec(DesignPoint(4.0, 1.6, 1e6))
    with pytest.raises(InfeasibleDesignError) as info:
        run_quasistatic_cycle(mat, ref_geom, spec)
    assert info.value.criterion == "yield"


def test_electrical_actuation_reaches_equilibrium(mat, ref_geom):
    spec = CycleSpec(DesignPoint(4.0), poling_voltage=2000.0, actuation_voltage=3000.0)
    r = run_quasistatic_cycle(mat, ref_geom, spec)
    assert r.design.lam_act > 1.0
    assert r.phases[2].voltage == 3000.0


def test_viscoelastic_creep_raises_lam_min(mat, ref_geom):
    base = dict(design=DesignPoint(4.0, 1.2), poling_voltage=2000.0)
    elastic = run_quasistatic_cycle(mat, ref_geom, CycleSpec(**base))
    visco = run_quasistatic_cycle(mat, ref_geom, CycleSpec(**base, include_viscoelasticity=True))
    assert elastic.lam_min == 4.0
    assert visco.lam_min > 4.0
    assert visco.produced < elastic.produced


def test_phase_duration_validation():
    with pytest.raises(ConfigError):
        CycleSpec(DesignPoint(2.0), phase_durations=(1.0, 1.0))
    with pytest.raises(ConfigError):
        CycleSpec(DesignPoint(2.0), phase_durations=(1.0, -1.0, 1.0, 1.0, 1.0))


def test_energy_density_uses_film_mass(mat, ref_geom):
    spec = CycleSpec(DesignPoint(4.0, 1.2), poling_voltage=1000.0)
    r = run_quasistatic_cycle(mat, ref_geom, spec)
    assert r.energy_density == pytest.approx(r.net / (960.0 * ref_geom.volume))
    assert math.isfinite(r.energy_density)
