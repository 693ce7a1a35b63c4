"""
Time integration of the membrane motion equation.

    m x10 lam'' = -6 x20 x30 (lam^2 - lam^-4) [C10 + 2 C20 (I1-3) + 3 C30 (I1-3)^2]
                  + x20 x30 eps E^2 / lam
                  + x30 / (x10 lam^2) m g

with the Yeoh coefficients relaxed in time. The leading factor 6 and the
gravity term are kept exactly as stated above rather than re-derived
from a free-body balance. An optional pre-stretch
adds the frame's dead load 6 x20 x30 F(lam_p) so that lam_p is an
equilibrium at zero field.
"""

from dataclasses import dataclass, field, replace
import math

import numpy as np

from .errors import ConfigError, DomainError, NumericalError
from .failure import ELASTIC_FACTOR
from .material import equibiaxial_elastic_term, relaxed_coefficients

__all__ = [
    "DynamicsConfig",
    "Trajectory",
    "field_at",
    "lambda_acceleration",
    "integrate",
    "select_time_step",
    "mean_power",
]


@dataclass(frozen=True)
class DynamicsConfig:
    """Integration setup.

    ``e_field`` is either a constant field (V/m) or a piecewise-constant
    schedule of ``(t_start, field)`` pairs sorted by time. ``gravity``
    defaults to zero, which switches the weight term off.
    """

    e_field: object = 0.0
    gravity: float = 0.0
    t_end: float = 1.0
    dt: float = 1e-3
    initial: tuple = (1.0, 0.0)
    prestretch: float = 1.0
    frozen_coefficients: bool = False

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if self.t_end < self.dt:
            raise ConfigError("t_end must be at least dt")
        if len(self.initial) != 2 or self.initial[0] <= 0:
            raise ConfigError("initial state must be (lambda > 0, lambda_dot)")
        if self.prestretch < 1:
            raise ConfigError("prestretch must be >= 1")
        if np.ndim(self.e_field) == 0:
            if self.e_field < 0:
                raise ConfigError("e_field must be non-negative")
        else:
            sched = np.asarray(self.e_field, dtype=float)
            if sched.ndim != 2 or sched.shape[1] != 2 or np.any(np.diff(sched[:, 0]) <= 0):
                raise ConfigError("e_field schedule must be increasing (t_start, field) rows")
            if np.any(sched[:, 1] < 0):
                raise ConfigError("e_field schedule values must be non-negative")
            object.__setattr__(self, "e_field", tuple(map(tuple, sched)))


@dataclass
class Trajectory:
    t: np.ndarray
    lam: np.ndarray
    lam_dot: np.ndarray
    dt: float
    scheme: str = "rk4"
    aborted: bool = False
    abort_reason: str = ""
    metadata: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.lam[-1], self.lam_dot[-1]


def field_at(cfg, t):
    if np.ndim(cfg.e_field) == 0:
        return float(cfg.e_field)
    value = 0.0
    for t_start, e in cfg.e_field:
        if t >= t_start:
            value = e
        else:
            break
    return value


def _coefficients(mat, cfg, t):
    return mat.yeoh0 if cfg.frozen_coefficients else relaxed_coefficients(mat, t)


def lambda_acceleration(mat, geom, state, cfg, e_field=None):
    """Second time derivative of the stretch for ``state = (lam, lam_dot, t)``.

    ``e_field`` overrides the configured field at ``t``.
    """
    lam, _, t = state
    if lam <= 0:
        raise DomainError("stretch must be positive")
    if geom.mass <= 0:
        raise DomainError("lumped mass must be positive for dynamics")
    coeffs = _coefficients(mat, cfg, t)
    e = field_at(cfg, t) if e_field is None else e_field
    elastic = ELASTIC_FACTOR * (equibiaxial_elastic_term(coeffs, lam)
                                - equibiaxial_elastic_term(coeffs, cfg.prestretch))
    force = (-geom.x20 * geom.x30 * elastic
             + geom.x20 * geom.x30 * mat.permittivity * e * e / lam
             + geom.x30 / (geom.x10 * lam * lam) * geom.mass * cfg.gravity)
    return force / (geom.mass * geom.x10)


def integrate(mat, geom, cfg):
    """Classical fixed-step RK4 on (lam, lam_dot).

    The field is held over each step at its value at the step midpoint,
    so a schedule switching on a grid time is resolved exactly instead of
    being sampled part-way through the Runge-Kutta stages. Stops early,
    flagging the trajectory, if lam leaves (0, yield stretch] or becomes
    non-finite; the last valid state is kept.
    """
    n_steps = int(round(cfg.t_end / cfg.dt))
    h = cfg.dt
    lam_max = mat.yield_stretch
    t = np.empty(n_steps + 1)
    y = np.empty((n_steps + 1, 2))
    t[0] = 0.0
    y[0] = cfg.initial

    def rhs(ti, yi, e):
        return np.array([yi[1], lambda_acceleration(mat, geom, (yi[0], yi[1], ti), cfg, e)])

    aborted, reason, last = False, "", n_steps
    for n in range(n_steps):
        tn, yn = t[n], y[n]
        try:
            e = field_at(cfg, tn + h / 2)
            k1 = rhs(tn, yn, e)
            k2 = rhs(tn + h / 2, yn + h / 2 * k1, e)
            k3 = rhs(tn + h / 2, yn + h / 2 * k2, e)
            k4 = rhs(tn + h, yn + h * k3, e)
        except DomainError:
            aborted, reason, last = True, "stretch became non-positive", n
            break
        y_next = yn + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y_next)) or y_next[0] <= 0:
            aborted, reason, last = True, "stretch became non-positive", n
            break
        if y_next[0] > lam_max:
            aborted, reason, last = True, "stretch exceeded the yield limit", n
            break
        t[n + 1] = (n + 1) * h
        y[n + 1] = y_next
    return Trajectory(t[: last + 1].copy(), y[: last + 1, 0].copy(), y[: last + 1, 1].copy(),
                      h, "rk4", aborted, reason,
                      {"steps": last, "frozen_coefficients": cfg.frozen_coefficients})


def select_time_step(mat, geom, cfg, tol=1e-8, max_halvings=16):
    """Halve ``cfg.dt`` until halving again moves every sample by < ``tol``.

    Returns the accepted configuration and its trajectory.
    """
    current = integrate(mat, geom, cfg)
    for _ in range(max_halvings):
        finer_cfg = replace(cfg, dt=cfg.dt / 2)
        finer = integrate(mat, geom, finer_cfg)
        common = finer.lam[::2]
        n = min(common.size, current.lam.size)
        if not current.aborted and not finer.aborted and np.max(np.abs(common[:n] - current.lam[:n])) < tol:
            return cfg, current
        cfg, current = finer_cfg, finer
    raise NumericalError(f"no step size met the {tol:g} halving rule after {max_halvings} halvings")


def mean_power(cycle_energy, frequency):
    """Average power of back-to-back cycles at ``frequency`` (W)."""
    if frequency < 0 or not math.isfinite(frequency):
        raise DomainError("frequency must be finite and non-negative")
    return cycle_energy * frequency
