"""
Reading capacitance back from a shunt current
=============================================

A converter charges the film through a series resistor and a shunt. As
the film relaxes its capacitance falls and charge flows back. Integrating
the shunt current (minus leakage) over a window recovers the capacitance.
"""

from elastoharvest.circuit import (
    CircuitParams,
    estimate_capacitance,
    piecewise_profile,
    scavenged_from_trace,
    simulate_trace,
)

circ = CircuitParams(r_e=1e7, r_mes=1e5, source=[(0.0, 1.0, True)])  # 1 V command -> 2 kV
profile = piecewise_profile([0.0, 0.02, 0.03, 0.05], [80.2e-12, 80.2e-12, 66.2e-12, 66.2e-12], r_p=5e12)

for noise in (0.0, 2e-9):
    trace = simulate_trace(circ, profile, t_end=0.05, dt=1e-5, noise_std=noise, seed=0)
    c_hi = estimate_capacitance(trace, (0.0, 0.02), 2000.0, profile.r)
    c_lo = estimate_capacitance(trace, (0.0, 0.05), 2000.0, profile.r)
    energy = scavenged_from_trace(c_hi, c_lo, 2000.0)
    print(f"noise {noise:.0e} A: C_max {c_hi * 1e12:.2f} pF, C_min {c_lo * 1e12:.2f} pF, "
          f"energy {energy * 1e6:.2f} uJ, step check ok: {not trace.refinement_required}")

print(f"peak return current during release: {trace.i_shunt[2000:3000].min() * 1e6:.2f} uA")
