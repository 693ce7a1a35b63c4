"""
Measurement circuit for a leaky, stretch-variable capacitor.

Topology (single node ``v`` across the film)::

    HV source --[R_e + R_mes]--+-- node v --+-- C_p(t) -- ground
                               |            +-- R_p(t)  -- ground
                               |            +-- R_load  -- ground (optional)

The source is a proportional converter (low-side command times gain)
that can be disconnected. The shunt R_mes sits in the source branch, so
the measured current is the source current

    i_shunt = (V_s - v) / (R_e + R_mes) = d(C_p v)/dt + v / R_p + v / R_load.

Time stepping freezes C_p, R_p and the source at each step midpoint and
advances the charge exactly (exponential update), so it stays stable for
any step relative to the R C time constants.
"""

from dataclasses import dataclass, replace
import math

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .errors import ConfigError, DomainError, EstimationError
from .cycle import constant_voltage_energy
from .membrane import capacitance, leakage_resistance

__all__ = [
    "SourceSegment",
    "CircuitParams",
    "CapacitorProfile",
    "Trace",
    "piecewise_profile",
    "profile_from_stretch",
    "simulate_trace",
    "estimate_capacitance",
    "scavenged_from_trace",
]


@dataclass(frozen=True)
class SourceSegment:
    t_start: float
    v_cmd: float
    connected: bool = True


@dataclass(frozen=True)
class CircuitParams:
    """Circuit constants. ``source`` rows hold low-side commands (0 to 5 V)."""

    r_e: float
    r_mes: float
    source: tuple
    converter_gain: float = 2000.0
    r_load: float = None
    v_cmd_range: tuple = (0.0, 5.0)

    def __post_init__(self):
        rows = tuple(s if isinstance(s, SourceSegment) else SourceSegment(*s) for s in self.source)
        object.__setattr__(self, "source", rows)
        if self.r_e <= 0 or self.r_mes <= 0:
            raise ConfigError("r_e and r_mes must be positive")
        if self.r_load is not None and self.r_load <= 0:
            raise ConfigError("r_load must be positive when given")
        if self.converter_gain <= 0:
            raise ConfigError("converter_gain must be positive")
        lo, hi = self.v_cmd_range
        starts = [s.t_start for s in rows]
        if any(b <= a for a, b in zip(starts, starts[1:])):
            raise ConfigError("source schedule times must increase")
        for s in rows:
            if not lo <= s.v_cmd <= hi:
                raise ConfigError(f"commanded voltage {s.v_cmd} V outside converter range {lo}-{hi} V")

    def source_at(self, t):
        """High-side voltage and connection state at time ``t``."""
        state = (0.0, False)
        for seg in self.source:
            if t >= seg.t_start:
                state = (seg.v_cmd * self.converter_gain, bool(seg.connected))
            else:
                break
        return state


@dataclass(frozen=True)
class CapacitorProfile:
    """Time-varying film capacitance (F) and leakage resistance (Ohm)."""

    capacitance: object
    resistance: object

    def c(self, t):
        return self.capacitance(t)

    def r(self, t):
        return self.resistance(t)


def piecewise_profile(times, capacitances, r_p):
    """Linear interpolation of capacitance samples with constant or sampled R_p."""
    times = np.asarray(times, dtype=float)
    caps = np.asarray(capacitances, dtype=float)
    if times.shape != caps.shape or np.any(np.diff(times) <= 0) or np.any(caps <= 0):
        raise ConfigError("capacitance profile needs increasing times and positive values")
    if np.ndim(r_p) == 0:
        if r_p <= 0:
            raise ConfigError("R_p must be positive")
        r_fun = lambda t, r=float(r_p): r
    else:
        rs = np.asarray(r_p, dtype=float)
        r_fun = lambda t: float(np.interp(t, times, rs))
    return CapacitorProfile(lambda t: float(np.interp(t, times, caps)), r_fun)


def profile_from_stretch(mat, geom, times, stretches):
    """Capacitance and leakage following a sampled stretch history."""
    times = np.asarray(times, dtype=float)
    lam = np.asarray(stretches, dtype=float)
    return piecewise_profile(times, capacitance(geom, mat.rel_permittivity, lam),
                             leakage_resistance(geom, mat.bulk_resistivity, lam))


@dataclass
class Trace:
    t: np.ndarray
    v_active: np.ndarray
    i_shunt: np.ndarray
    charge: np.ndarray
    dt: float
    refinement_required: bool = False
    halving_change: float = 0.0


def _run(circ, profile, n_steps, dt, v0):
    t = np.arange(n_steps + 1) * dt
    q = np.empty(n_steps + 1)
    v = np.empty(n_steps + 1)
    i = np.empty(n_steps + 1)
    g_src = 1.0 / (circ.r_e + circ.r_mes)
    g_load = 0.0 if circ.r_load is None else 1.0 / circ.r_load
    v[0] = v0
    q[0] = profile.c(0.0) * v0
    for n in range(n_steps):
        vs, conn = circ.source_at(t[n])
        i[n] = g_src * (vs - v[n]) if conn else 0.0
        tm = t[n] + 0.5 * dt
        vs_m, conn_m = circ.source_at(tm)
        gs = g_src if conn_m else 0.0
        c_m = profile.c(tm)
        k = (gs + 1.0 / profile.r(tm) + g_load) / c_m
        q_inf = gs * vs_m / k
        q[n + 1] = q_inf + (q[n] - q_inf) * math.exp(-k * dt)
        v[n + 1] = q[n + 1] / profile.c(t[n + 1])
    vs, conn = circ.source_at(t[-1])
    i[-1] = g_src * (vs - v[-1]) if conn else 0.0
    return t, v, i, q


def simulate_trace(circ, profile, t_end, dt, v0=0.0, noise_std=0.0, seed=None, check_step=True):
    """Voltage across the film and shunt current on a fixed time grid.

    The step is checked by rerunning at ``dt / 2``; if any common sample of
    ``v`` moves by more than 1e-6 of the peak voltage the trace is flagged
    with ``refinement_required``. Optional Gaussian noise of standard
    deviation ``noise_std`` (A) is added to the shunt current.
    """
    if dt <= 0 or t_end < dt:
        raise ConfigError("need dt > 0 and t_end >= dt")
    n_steps = int(round(t_end / dt))
    t, v, i, q = _run(circ, profile, n_steps, dt, v0)
    change = 0.0
    if check_step:
        _, v_half, _, _ = _run(circ, profile, 2 * n_steps, dt / 2, v0)
        scale = max(np.max(np.abs(v)), np.finfo(float).tiny)
        change = float(np.max(np.abs(v_half[::2] - v)) / scale)
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        i = i + rng.normal(0.0, noise_std, size=i.shape)
    return Trace(t, v, i, q, dt, change > 1e-6, change)


def estimate_capacitance(trace, window, v_known, r_p, r_load=None, q_initial=0.0, tail_fraction=0.25):
    """Film capacitance from the charge delivered over a measurement window.

    The conduction current ``v / R_p`` (and ``v / R_load``) is subtracted
    from the shunt current, the remainder is integrated over ``window``,
    and a least-squares line through the final ``tail_fraction`` of the
    cumulative charge gives the charge at the window end. The result is
    ``(q_initial + q_end) / v_known``; ``q_initial`` is the charge already
    on the film at the window start.
    """
    t0, t1 = window
    if v_known <= 0:
        raise DomainError("v_known must be positive")
    mask = (trace.t >= t0) & (trace.t <= t1)
    if np.count_nonzero(mask) < 4:
        raise EstimationError(f"window {window} holds fewer than 4 samples")
    t = trace.t[mask]
    v = trace.v_active[mask]
    r = np.array([r_p(x) for x in t]) if callable(r_p) else np.full_like(t, float(r_p))
    i_cap = trace.i_shunt[mask] - v / r
    if r_load is not None:
        i_cap = i_cap - v / r_load
    q = cumulative_trapezoid(i_cap, t, initial=0.0)

    n_tail = max(2, int(math.ceil(tail_fraction * t.size)))
    slope, intercept = np.polyfit(t[-n_tail:], q[-n_tail:], 1)
    q_end = slope * t[-1] + intercept
    total = q_initial + q_end

    # white-noise floor of the integrated current
    sigma_i = np.std(np.diff(i_cap)) / math.sqrt(2.0) if t.size > 2 else 0.0
    floor = 3.0 * sigma_i * trace.dt * math.sqrt(t.size)
    if abs(total) <= floor or np.max(np.abs(i_cap)) == 0.0:
        raise EstimationError(
            f"no capacitive signal in window {window}: charge {total:.3e} C, "
            f"noise floor {floor:.3e} C, peak current {np.max(np.abs(i_cap)):.3e} A")
    return float(total / v_known)


def scavenged_from_trace(c_max, c_min, v):
    """0.5 (C_max - C_min) v**2 from measured capacitances."""
    if c_max < c_min:
        raise DomainError("c_max must be >= c_min")
    return constant_voltage_energy(c_max, c_min, v)
