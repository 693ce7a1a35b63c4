"""
Failure criteria and operating envelope of a pre-stretched membrane.

Three limits bound the usable design space: mechanical yield (a maximum
area expansion), dielectric breakdown (a field limit inversely
proportional to thickness) and the electromechanical pull-in
instability. All electromechanical balances here are quasi-static
versions of the membrane motion equation, written per unit reference
cross-section x20*x30:

    balance(lam) = 6 [F(lam) - F(lam_ref)] - eps E(lam)**2 / lam

where F is :func:`~elastoharvest.material.equibiaxial_elastic_term` and
``lam_ref`` is the pre-stretch held by the frame (a dead load that
vanishes for ``lam_ref = 1``). A positive balance means the elastic
restoring stress wins.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import ConfigError, DomainError
from .material import EPSILON_0, equibiaxial_elastic_term
from .membrane import thickness_at

__all__ = [
    "Verdict",
    "DesignPoint",
    "BreakdownTable",
    "PullIn",
    "OperatingEnvelope",
    "ELASTIC_FACTOR",
    "GRID_POINTS",
    "DEFAULT_K_BD",
    "static_balance",
    "equilibrium_stretch",
    "has_equilibrium",
    "mechanical_limit",
    "breakdown_field",
    "pullin_point",
    "pullin_field",
    "actuation_voltage",
    "actuation_field",
    "classify",
    "envelope_grid",
]

ELASTIC_FACTOR = 6.0  # leading factor of the elastic force in the motion equation
GRID_POINTS = 512
DEFAULT_K_BD = 3.89e3  # V; 140 MV/m at the thickness reached for lam_p = 4, lam_act = 1.5
_REL = 1e-12


class Verdict(str, Enum):
    FEASIBLE = "feasible"
    YIELD = "yield"
    BREAKDOWN = "breakdown"
    PULL_IN = "pull_in"


@dataclass(frozen=True)
class DesignPoint:
    lam_p: float
    lam_act: float = 1.0
    e_field: float = 0.0

    def __post_init__(self):
        if self.lam_p < 1 or self.lam_act < 1:
            raise DomainError(f"stretches must be >= 1, got ({self.lam_p}, {self.lam_act})")
        if self.e_field < 0:
            raise DomainError("e_field must be non-negative")

    @property
    def lam_max(self):
        return self.lam_p * self.lam_act


@dataclass(frozen=True)
class BreakdownTable:
    """Tabulated breakdown field versus thickness, linearly interpolated."""

    thickness: tuple
    field: tuple

    def __post_init__(self):
        t = np.asarray(self.thickness, dtype=float)
        f = np.asarray(self.field, dtype=float)
        if t.ndim != 1 or t.shape != f.shape or t.size < 2:
            raise ConfigError("breakdown table needs matching thickness/field columns (>= 2 rows)")
        if np.any(np.diff(t) <= 0) or np.any(t <= 0) or np.any(f <= 0):
            raise ConfigError("breakdown table thickness must increase; all entries positive")
        object.__setattr__(self, "thickness", tuple(t))
        object.__setattr__(self, "field", tuple(f))

    def __call__(self, thickness):
        return np.interp(thickness, self.thickness, self.field)


@dataclass(frozen=True)
class PullIn:
    """Loss-of-equilibrium threshold under voltage control.

    ``voltage`` is the largest voltage for which a static equilibrium
    exists below the yield stretch; ``stretch`` is where it is reached.
    Both are ``inf`` when the equilibrium branch stays stable all the way
    to the yield stretch.
    """

    voltage: float
    stretch: float

    @property
    def exists(self):
        return math.isfinite(self.voltage)


@dataclass
class OperatingEnvelope:
    lam_p: np.ndarray
    lam_act: np.ndarray
    verdicts: np.ndarray
    limiting_field: np.ndarray
    required_field: np.ndarray
    mechanical_boundary: np.ndarray
    breakdown_boundary: np.ndarray
    pullin_boundary: np.ndarray
    resolution: tuple
    metadata: dict = field(default_factory=dict)

    @property
    def feasible(self):
        return self.verdicts == Verdict.FEASIBLE.value

    def counts(self):
        values, n = np.unique(self.verdicts, return_counts=True)
        return {str(v): int(c) for v, c in zip(values, n)}


# --- electromechanical balance ----------------------------------------------

def _field_profile(lam, geom, eps, e_field, voltage, charge):
    given = [v is not None for v in (e_field, voltage, charge)]
    if sum(given) != 1:
        raise DomainError("specify exactly one of e_field, voltage, charge")
    if e_field is not None:
        return np.full_like(lam, float(e_field))
    if voltage is not None:
        return voltage * lam**2 / geom.x30
    return charge / (eps * geom.x10 * geom.x20 * lam**2)


def static_balance(coeffs, geom, rel_permittivity, lam, lam_ref=1.0, *, e_field=None,
                   voltage=None, charge=None):
    """Net restoring stress of the film at stretch ``lam`` (Pa).

    The electrical load is one of: a fixed true field ``e_field``, a
    fixed ``voltage`` (field grows as the film thins) or a fixed
    ``charge`` on the electrodes.
    """
    lam = np.asarray(lam, dtype=float)
    eps = EPSILON_0 * rel_permittivity
    e = _field_profile(lam, geom, eps, e_field, voltage, charge)
    elastic = ELASTIC_FACTOR * (equibiaxial_elastic_term(coeffs, lam)
                                - equibiaxial_elastic_term(coeffs, lam_ref))
    out = elastic - eps * e**2 / lam
    return out if out.ndim else float(out)


def _grid(lo, hi, n=GRID_POINTS):
    return np.geomspace(lo, hi, n)


def equilibrium_stretch(coeffs, geom, rel_permittivity, lam_ref, lam_upper, *, e_field=None,
                        voltage=None, charge=None, n_grid=GRID_POINTS):
    """First (stable) equilibrium above ``lam_ref``, or None when there is none.

    Brackets sign changes of :func:`static_balance` on a log-spaced grid
    over ``[lam_ref, lam_upper]`` and refines the first one to 1e-9
    relative.
    """
    load = dict(e_field=e_field, voltage=voltage, charge=charge)
    f0 = static_balance(coeffs, geom, rel_permittivity, lam_ref, lam_ref, **load)
    if f0 >= 0:
        return float(lam_ref)
    if lam_upper <= lam_ref:
        return None
    lam = _grid(lam_ref, lam_upper, n_grid)
    g = static_balance(coeffs, geom, rel_permittivity, lam, lam_ref, **load)
    hits = np.flatnonzero(g >= 0)
    if hits.size == 0:
        return None
    i = hits[0]
    if g[i] == 0:
        return float(lam[i])
    fun = lambda x: static_balance(coeffs, geom, rel_permittivity, x, lam_ref, **load)
    return float(brentq(fun, lam[i - 1], lam[i], xtol=1e-12, rtol=1e-9))


def _required_voltage_sq(coeffs, geom, eps, lam, lam_p):
    """Squared voltage holding the film at ``lam`` against a pre-stretch ``lam_p``."""
    d_elastic = ELASTIC_FACTOR * (equibiaxial_elastic_term(coeffs, lam)
                                  - equibiaxial_elastic_term(coeffs, lam_p))
    return d_elastic * geom.x30**2 / (eps * np.asarray(lam, dtype=float) ** 3)


def has_equilibrium(mat, geom, lam_p, e_field, coeffs=None, n_grid=GRID_POINTS):
    """Whether a voltage-controlled film at pre-stretch ``lam_p`` can balance ``e_field``.

    ``e_field`` is measured at the pre-stretched thickness.
    """
    coeffs = mat.yeoh0 if coeffs is None else coeffs
    lam_hi = mat.yield_stretch
    if lam_p >= lam_hi:
        return True
    v = e_field * thickness_at(geom, lam_p)
    lam = _grid(lam_p, lam_hi, n_grid)
    h = _required_voltage_sq(coeffs, geom, mat.permittivity, lam, lam_p)
    if np.any(h >= v * v):
        return True
    # a tangency between grid nodes can still admit a solution
    i = int(np.argmax(h))
    lo, hi = lam[max(i - 1, 0)], lam[min(i + 1, lam.size - 1)]
    res = minimize_scalar(lambda x: -_required_voltage_sq(coeffs, geom, mat.permittivity, x, lam_p),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    return bool(-res.fun >= v * v)


# --- criteria ---------------------------------------------------------------

def mechanical_limit(mat, lam_p):
    """Largest actuation stretch before the yield area expansion is reached."""
    if lam_p < 1:
        raise DomainError(f"lam_p must be >= 1, got {lam_p}")
    return max(mat.yield_stretch / lam_p, 1.0)


def breakdown_field(thickness, k_bd=DEFAULT_K_BD):
    """Breakdown field k_bd / thickness, or a tabulated lookup."""
    thickness = np.asarray(thickness, dtype=float)
    if np.any(thickness <= 0):
        raise DomainError("thickness must be positive")
    if callable(k_bd):
        out = np.asarray(k_bd(thickness), dtype=float)
    else:
        out = k_bd / thickness
    return out if out.ndim else float(out)


@lru_cache(maxsize=4096)
def _pullin_cached(coeffs, geom, eps, lam_p, lam_hi, n_grid):
    if lam_p >= lam_hi:
        return PullIn(math.inf, math.inf)
    lam = _grid(lam_p, lam_hi, n_grid)
    h = _required_voltage_sq(coeffs, geom, eps, lam, lam_p)
    i = int(np.argmax(h))
    if i == lam.size - 1:
        return PullIn(math.inf, math.inf)
    lo = lam[max(i - 1, 0)]
    hi = lam[i + 1]
    res = minimize_scalar(lambda x: -_required_voltage_sq(coeffs, geom, eps, x, lam_p),
                          bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    peak = max(-res.fun, h[i])
    stretch = float(res.x) if -res.fun >= h[i] else float(lam[i])
    if peak <= 0:
        return PullIn(math.inf, math.inf)
    return PullIn(math.sqrt(peak), stretch)


def pullin_point(mat, geom, lam_p, coeffs=None, n_grid=GRID_POINTS):
    """Critical voltage and stretch for a film pre-stretched to ``lam_p``."""
    if lam_p < 1:
        raise DomainError(f"lam_p must be >= 1, got {lam_p}")
    coeffs = mat.yeoh0 if coeffs is None else coeffs
    return _pullin_cached(coeffs, geom, mat.permittivity, float(lam_p), mat.yield_stretch, n_grid)


def pullin_field(mat, geom, lam_p, lam_total=None, coeffs=None):
    """Pull-in threshold expressed as a field at the thickness of ``lam_total``.

    ``lam_total`` defaults to ``lam_p``; ``inf`` means no pull-in below yield.
    """
    pi = pullin_point(mat, geom, lam_p, coeffs)
    if not pi.exists:
        return math.inf
    lam_total = lam_p if lam_total is None else lam_total
    return pi.voltage / thickness_at(geom, lam_total)


def actuation_voltage(mat, geom, lam_p, lam_total, coeffs=None):
    """Voltage that electrically holds the film at ``lam_total``."""
    coeffs = mat.yeoh0 if coeffs is None else coeffs
    h = _required_voltage_sq(coeffs, geom, mat.permittivity, lam_total, lam_p)
    return np.sqrt(np.maximum(h, 0.0))


def actuation_field(mat, geom, lam_p, lam_total, coeffs=None):
    v = actuation_voltage(mat, geom, lam_p, lam_total, coeffs)
    return v / thickness_at(geom, lam_total)


def classify(mat, geom, pt, k_bd=DEFAULT_K_BD, actuation="mechanical"):
    """First violated criterion (yield, breakdown, pull-in) or feasible.

    With ``actuation="mechanical"`` the film is held at lam_max by an
    external load and ``pt.e_field`` is the poling field there; pull-in
    occurs when the corresponding voltage has no equilibrium on release.
    With ``actuation="electrical"`` the field itself holds the stretch,
    so any stretch past the pull-in point is unstable.
    """
    lam_max = pt.lam_max
    if lam_max > mat.yield_stretch * (1 + _REL):
        return Verdict.YIELD
    thickness = thickness_at(geom, lam_max)
    if pt.e_field > breakdown_field(thickness, k_bd) * (1 + _REL):
        return Verdict.BREAKDOWN
    pi = pullin_point(mat, geom, pt.lam_p)
    if actuation == "mechanical":
        if pt.e_field * thickness > pi.voltage * (1 + _REL):
            return Verdict.PULL_IN
    elif actuation == "electrical":
        if lam_max > pi.stretch * (1 + _REL):
            return Verdict.PULL_IN
    else:
        raise DomainError(f"unknown actuation mode {actuation!r}")
    return Verdict.FEASIBLE


# --- envelope -----------------------------------------------------------------

def _axis(bounds, n, name):
    try:
        lo, hi = (float(b) for b in bounds)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a (low, high) pair") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or hi <= lo:
        raise ConfigError(f"{name}: empty or inverted range ({lo}, {hi})")
    if lo < 1:
        raise ConfigError(f"{name}: stretches must be >= 1")
    return np.linspace(lo, hi, n)


def _breakdown_stretch(mat, geom, lam_p, k_bd, lam_stop):
    """Largest stretch on the stable branch whose actuation field stays below breakdown."""
    if lam_stop <= lam_p:
        return None
    margin = lambda x: actuation_field(mat, geom, lam_p, x) - breakdown_field(thickness_at(geom, x), k_bd)
    lam = _grid(lam_p, lam_stop, GRID_POINTS)
    m = margin(lam)
    hits = np.flatnonzero(m[1:] > 0) + 1
    if hits.size == 0:
        return None
    i = hits[0]
    return float(brentq(margin, lam[i - 1], lam[i], xtol=1e-12, rtol=1e-10))


def envelope_grid(mat, geom, lam_p_range, lam_act_range, resolution=64, k_bd=DEFAULT_K_BD,
                  workers=1):
    """Rasterize the actuator operating area over (lam_p, lam_act).

    Each cell is classified with the field required to electrically
    reach its stretch. The coefficients are the instantaneous ones.
    """
    if np.ndim(resolution) == 0:
        resolution = (int(resolution), int(resolution))
    n_p, n_a = (int(r) for r in resolution)
    if n_p < 2 or n_a < 2:
        raise ConfigError("envelope resolution must be >= 2 per axis")
    lam_p = _axis(lam_p_range, n_p, "lam_p range")
    lam_act = _axis(lam_act_range, n_a, "lam_act range")

    def row(i):
        lp = lam_p[i]
        lam_tot = lp * lam_act
        verdicts = []
        required = np.full(lam_act.size, np.nan)
        limiting = np.full(lam_act.size, np.nan)
        for j, la in enumerate(lam_act):
            lt = lam_tot[j]
            if lt > mat.yield_stretch * (1 + _REL):
                verdicts.append(Verdict.YIELD.value)
                continue
            thk = thickness_at(geom, lt)
            e_req = float(actuation_field(mat, geom, lp, lt))
            e_bd = breakdown_field(thk, k_bd)
            required[j] = e_req
            limiting[j] = min(e_bd, pullin_field(mat, geom, lp, lt))
            pt = DesignPoint(lp, la, min(e_req, e_bd))
            verdict = classify(mat, geom, pt, k_bd, actuation="electrical")
            if verdict is Verdict.FEASIBLE and e_req > e_bd * (1 + _REL):
                verdict = Verdict.BREAKDOWN
            verdicts.append(verdict.value)
        return verdicts, required, limiting

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(lam_p.size)))
    else:
        rows = [row(i) for i in range(lam_p.size)]

    verdicts = np.array([r[0] for r in rows], dtype=object)
    required = np.array([r[1] for r in rows])
    limiting = np.array([r[2] for r in rows])

    mech = [(lp, mat.yield_stretch / lp) for lp in lam_p if lp <= mat.yield_stretch]
    bd, pull = [], []
    for lp in lam_p:
        pi = pullin_point(mat, geom, lp)
        stop = min(pi.stretch, mat.yield_stretch)
        lam_b = _breakdown_stretch(mat, geom, lp, k_bd, stop)
        if lam_b is not None:
            bd.append((lp, lam_b / lp))
        if pi.exists:
            pull.append((lp, pi.stretch / lp))

    return OperatingEnvelope(
        lam_p=lam_p,
        lam_act=lam_act,
        verdicts=verdicts,
        limiting_field=limiting,
        required_field=required,
        mechanical_boundary=np.array(mech).reshape(-1, 2),
        breakdown_boundary=np.array(bd).reshape(-1, 2),
        pullin_boundary=np.array(pull).reshape(-1, 2),
        resolution=(n_p, n_a),
        metadata={"coefficients": "instantaneous (t = 0)", "k_bd": repr(k_bd)},
    )
