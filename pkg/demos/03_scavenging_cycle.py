"""
One scavenging cycle on a pre-stretched membrane
================================================

A 1 cm x 1 cm film (2.5 mm x 2.5 mm x 1 mm before a 4x equibiaxial
pre-stretch) is stretched electrically at 4 kV, poled at 2 kV and then
released. The capacitance swing pushes charge back into the source.
"""

from pathlib import Path

from elastoharvest.config import parse_config
from elastoharvest.cycle import CycleMode, CycleSpec, produced_energy, run_quasistatic_cycle
from elastoharvest.failure import DesignPoint

cfg = parse_config(Path(__file__).resolve().parents[1] / "configs" / "replicate_membrane_2kv.yaml")
b = cfg.block("cycle")
spec = CycleSpec(DesignPoint(b["lam_p"]), b["mode"], b["poling_voltage_v"],
                 b["phase_durations_s"], b["include_viscoelasticity"], b["actuation_voltage_v"])
result = run_quasistatic_cycle(cfg.material, cfg.geometry, spec, cfg.k_bd)

for phase in result.phases:
    print(f"{phase.phase:<16} lambda {phase.lam:6.3f}  C {phase.capacitance * 1e12:7.2f} pF  "
          f"V {phase.voltage:6.0f} V")
print(f"produced {result.produced * 1e6:.2f} uJ, leakage {result.conduction_loss * 1e6:.2f} uJ, "
      f"net {result.net * 1e6:.2f} uJ")
for w in result.warnings:
    print("warning:", w)

# %% The same ledger fed with the measured capacitances
m = b["measured"]
print(f"from measured C: {produced_energy(m['c_max_f'], m['c_min_f'], 2e3, 2e3) * 1e6:.2f} uJ")

# %% Without viscoelastic creep the release is shallower
elastic = run_quasistatic_cycle(cfg.material, cfg.geometry, CycleSpec(
    spec.design, spec.mode, spec.poling_voltage, spec.phase_durations, False, spec.actuation_voltage))
print(f"purely elastic model: net {elastic.net * 1e6:.2f} uJ")

# %% Holding the charge instead of the voltage
charge = run_quasistatic_cycle(cfg.material, cfg.geometry, CycleSpec(
    spec.design, CycleMode.CONSTANT_CHARGE, spec.poling_voltage, spec.phase_durations, True,
    spec.actuation_voltage))
print(f"constant charge: voltage rises to {charge.v_max:.0f} V, net {charge.net * 1e6:.2f} uJ")
