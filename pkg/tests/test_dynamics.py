from dataclasses import replace
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from elastoharvest.dynamics import (
    DynamicsConfig,
    field_at,
    integrate,
    lambda_acceleration,
    mean_power,
    select_time_step,
)
from elastoharvest.errors import ConfigError, DomainError
from elastoharvest.membrane import MembraneGeometry


def smooth_case(dt, t_end=1e-3):
    return DynamicsConfig(e_field=3e7, gravity=0.0, t_end=t_end, dt=dt, initial=(4.0, 0.0),
                          prestretch=4.0, frozen_coefficients=True)


def observed_order(mat, geom, dt):
    ends = [integrate(mat, geom, smooth_case(h)).lam[-1] for h in (dt, dt / 2, dt / 4)]
    return math.log2(abs(ends[0] - ends[1]) / abs(ends[1] - ends[2]))


def test_rk4_convergence_order(mat, ref_geom):
    assert observed_order(mat, ref_geom, 2e-5) >= 3.8


def test_equilibrium_is_stationary(mat, ref_geom):
    cfg = DynamicsConfig(e_field=3e7, gravity=9.81, t_end=1e-3, dt=1e-6, prestretch=4.0,
                         frozen_coefficients=True)
    lam_eq = brentq(lambda x: lambda_acceleration(mat, ref_geom, (x, 0.0, 0.0), cfg), 4.0, 5.5,
                    xtol=1e-15)
    traj = integrate(mat, ref_geom, replace(cfg, initial=(lam_eq, 0.0)))
    assert traj.t.size == 1001
    assert np.max(np.abs(traj.lam - lam_eq)) < 1e-9


def test_rest_state_without_field(mat, ref_geom):
    cfg = DynamicsConfig(gravity=0.0, t_end=1e-3, dt=1e-5, initial=(4.0, 0.0), prestretch=4.0)
    traj = integrate(mat, ref_geom, cfg)
    assert np.all(traj.lam == 4.0)


def test_field_pulls_film_outward(mat, ref_geom):
    traj = integrate(mat, ref_geom, smooth_case(1e-5))
    assert traj.lam.max() > 4.0
    assert not traj.aborted


def test_relaxation_softens_response(mat, ref_geom):
    frozen = integrate(mat, ref_geom, replace(smooth_case(1e-4, 0.5)))
    relaxing = integrate(mat, ref_geom, replace(smooth_case(1e-4, 0.5), frozen_coefficients=False))
    assert relaxing.lam[-1000:].mean() > frozen.lam[-1000:].mean()


def test_grid_strictly_increasing(mat, ref_geom):
    traj = integrate(mat, ref_geom, smooth_case(1e-5))
    assert np.all(np.diff(traj.t) > 0)


def test_abort_above_yield(mat, ref_geom):
    cfg = DynamicsConfig(e_field=1e9, gravity=0.0, t_end=1e-2, dt=1e-6, initial=(5.9, 0.0), prestretch=4.0)
    traj = integrate(mat, ref_geom, cfg)
    assert traj.aborted
    assert "yield" in traj.abort_reason
    assert traj.lam[-1] <= mat.yield_stretch


def test_field_schedule():
    cfg = DynamicsConfig(e_field=[(0.0, 0.0), (0.5, 1e7)])
    assert field_at(cfg, 0.2) == 0.0
    assert field_at(cfg, 0.5) == 1e7
    with pytest.raises(ConfigError):
        DynamicsConfig(e_field=[(0.5, 0.0), (0.1, 1e7)])


def test_step_selection(mat, ref_geom):
    cfg, traj = select_time_step(mat, ref_geom, smooth_case(2e-5, 2e-4))
    finer = integrate(mat, ref_geom, replace(cfg, dt=cfg.dt / 2))
    assert np.max(np.abs(finer.lam[::2] - traj.lam)) < 1e-8


def test_massless_film_rejected(mat):
    geom = MembraneGeometry(2.5e-3, 2.5e-3, 1e-3, 0.0)
    with pytest.raises(DomainError):
        lambda_acceleration(mat, geom, (4.0, 0.0, 0.0), DynamicsConfig())


@pytest.mark.parametrize("f", [0.1, 1.0, 100.0])
def test_mean_power_linear(f):
    assert mean_power(4.1e-3, f) == 4.1e-3 * f


def test_mean_power_rejects_negative_frequency():
    with pytest.raises(DomainError):
        mean_power(1.0, -1.0)


def test_switched_field_keeps_step_selection_cheap(mat, ref_geom):
    cfg = DynamicsConfig(e_field=[(0.0, 0.0), (1e-3, 3e7)], gravity=0.0, t_end=2e-3, dt=2e-5,
                         initial=(4.0, 0.0), prestretch=4.0)
    accepted, traj = select_time_step(mat, ref_geom, cfg)
    assert accepted.dt >= 2e-5 / 16
    # the film stays at rest until the field switches on
    assert np.all(traj.lam[traj.t < 1e-3 - 1e-12] == 4.0)
