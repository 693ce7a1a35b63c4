"""
Design-space search for the largest net scavenged energy.

Both searches are plain deterministic grids. Cells may be evaluated on a
thread pool; results are collected by cell index and reduced with a
fixed tie-break, so the answer does not depend on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .cycle import CycleMode, CycleSpec, run_quasistatic_cycle
from .errors import ConfigError, InfeasibleDesignError
from .failure import (
    DEFAULT_K_BD,
    DesignPoint,
    Verdict,
    breakdown_field,
    classify,
    mechanical_limit,
    pullin_field,
)
from .membrane import thickness_at

__all__ = ["SweepRow", "SweepResult", "limit_field", "sweep_prestrain", "maximize_energy"]


@dataclass(frozen=True)
class SweepRow:
    design: DesignPoint
    net: float
    produced: float
    loss: float
    limiting: str


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    best: int

    @property
    def best_row(self):
        return self.rows[self.best]


def limit_field(mat, geom, lam_p, lam_act, k_bd=DEFAULT_K_BD):
    """Largest admissible poling field at the lam_max thickness and which limit sets it."""
    lam_max = lam_p * lam_act
    e_bd = breakdown_field(thickness_at(geom, lam_max), k_bd)
    e_pi = pullin_field(mat, geom, lam_p, lam_max)
    if e_pi < e_bd:
        return e_pi, Verdict.PULL_IN.value
    return e_bd, Verdict.BREAKDOWN.value


def _map(fn, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _template(cycle):
    return cycle or CycleSpec(DesignPoint(1.0), CycleMode.CONSTANT_VOLTAGE)


def _cycle(mat, geom, template, design, k_bd):
    spec = CycleSpec(design, template.mode, None, template.phase_durations,
                     template.include_viscoelasticity, None)
    return run_quasistatic_cycle(mat, geom, spec, k_bd)


def sweep_prestrain(mat, geom, lam_p_range, resolution, k_bd=DEFAULT_K_BD, cycle=None, workers=1):
    """Net energy versus pre-stretch with lam_act at the mechanical limit and E at its limit.

    ``cycle`` supplies the mode, phase durations and viscoelastic flag used
    for every point.
    """
    lo, hi = (float(v) for v in lam_p_range)
    if not (1.0 <= lo <= hi <= mat.yield_stretch):
        raise ConfigError(f"lam_p range must lie within [1, {mat.yield_stretch:g}]")
    if resolution < 1:
        raise ConfigError("sweep resolution must be >= 1")
    lam_ps = np.array([lo]) if resolution == 1 or hi == lo else np.linspace(lo, hi, int(resolution))
    template = _template(cycle)

    def row(lp):
        la = mechanical_limit(mat, lp)
        e, limiting = limit_field(mat, geom, lp, la, k_bd)
        design = DesignPoint(float(lp), float(la), float(e))
        res = _cycle(mat, geom, template, design, k_bd)
        return SweepRow(design, res.net, res.produced, res.conduction_loss, limiting)

    rows = tuple(_map(row, lam_ps, workers))
    best = max(range(len(rows)), key=lambda i: (rows[i].net, -i))
    if not math.isfinite(rows[best].net):
        raise InfeasibleDesignError("sweep produced no finite energy")
    return SweepResult(rows, best)


def _axis(bounds, n, name):
    lo, hi = (float(v) for v in bounds)
    if hi < lo:
        raise ConfigError(f"{name}: inverted bounds ({lo}, {hi})")
    if hi == lo or n == 1:
        return np.array([lo])
    return np.linspace(lo, hi, int(n))


def maximize_energy(mat, geom, bounds, resolution, k_bd=DEFAULT_K_BD, cycle=None, workers=1):
    """Grid search over (lam_p, lam_act, E) for the largest net energy.

    ``bounds`` is ``((lam_p_lo, lam_p_hi), (lam_act_lo, lam_act_hi),
    (e_lo, e_hi))``. Infeasible points are skipped; ties go to the
    smallest lam_p, then the smallest E, then the smallest lam_act.
    Returns ``(design, cycle_result)``.
    """
    if np.ndim(resolution) == 0:
        resolution = (int(resolution),) * 3
    if len(bounds) != 3 or len(resolution) != 3:
        raise ConfigError("need bounds and resolution for lam_p, lam_act and e_field")
    axes = [_axis(b, n, name) for b, n, name in zip(bounds, resolution, ("lam_p", "lam_act", "e_field"))]
    if axes[0][0] < 1 or axes[1][0] < 1 or axes[2][0] < 0:
        raise ConfigError("stretch bounds must be >= 1 and field bounds >= 0")
    template = _template(cycle)
    points = [(lp, la, e) for lp in axes[0] for la in axes[1] for e in axes[2]]

    def evaluate(p):
        design = DesignPoint(*map(float, p))
        verdict = classify(mat, geom, design, k_bd)
        if verdict is not Verdict.FEASIBLE:
            return verdict.value, None
        try:
            return Verdict.FEASIBLE.value, _cycle(mat, geom, template, design, k_bd)
        except InfeasibleDesignError as exc:
            return exc.criterion or "infeasible", None

    results = _map(evaluate, points, workers)
    counts = {}
    best = None
    for p, (verdict, res) in zip(points, results):
        counts[verdict] = counts.get(verdict, 0) + 1
        if res is None:
            continue
        key = (-res.net, p[0], p[2], p[1])
        if best is None or key < best[0]:
            best = (key, p, res)
    if best is None:
        raise InfeasibleDesignError(f"no feasible design in the search box: {counts}", counts=counts)
    return best[2].design, best[2]
