import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from elastoharvest.errors import ConfigError, DomainError
from elastoharvest.material import (
    MaterialParams,
    PronyTerm,
    YeohCoefficients,
    cauchy_stress_equibiaxial,
    cauchy_stress_uniaxial,
    dump_material,
    equibiaxial_invariant,
    equibiaxial_stretches,
    first_invariant,
    load_material,
    material_from_dict,
    material_to_dict,
    relaxation_factor,
    relaxed_coefficients,
    strain_energy,
)

COEFFS = YeohCoefficients(69300.0, -888.0, 5.87)


def fd_equibiaxial(coeffs, lam, h=1e-6):
    # sigma = lam dW/dlam with W(lam) = W(2 lam^2 + lam^-4) and sigma3 = 0
    w = lambda x: strain_energy(coeffs, equibiaxial_invariant(x))
    return 0.5 * lam * (w(lam * (1 + h)) - w(lam * (1 - h))) / (2 * lam * h)


def fd_uniaxial(coeffs, lam, h=1e-6):
    w = lambda x: strain_energy(coeffs, x**2 + 2 / x)
    return lam * (w(lam * (1 + h)) - w(lam * (1 - h))) / (2 * lam * h)


def test_invariant_at_reference():
    assert first_invariant(1.0, 1.0, 1.0) == 3.0
    assert equibiaxial_invariant(1.0) == 3.0


@pytest.mark.parametrize("lam", [0.5, 1.0, 1.7, 4.0, 6.0])
def test_equibiaxial_volume_conservation(lam):
    l1, l2, l3 = equibiaxial_stretches(lam)
    assert abs(l1 * l2 * l3 - 1.0) < 1e-12


def test_zero_energy_and_stress_at_rest():
    assert strain_energy(COEFFS, 3.0) == 0.0
    assert cauchy_stress_equibiaxial(COEFFS, 1.0) == 0.0
    assert cauchy_stress_uniaxial(COEFFS, 1.0) == 0.0


def test_energy_below_reference_invariant_rejected():
    with pytest.raises(DomainError):
        strain_energy(COEFFS, 2.9)


@pytest.mark.parametrize("lam", np.linspace(0.5, 5.0, 19))
def test_stress_matches_finite_difference(lam):
    exact = cauchy_stress_equibiaxial(COEFFS, lam)
    assert fd_equibiaxial(COEFFS, lam) == pytest.approx(exact, rel=1e-6, abs=1e-3)
    exact_u = cauchy_stress_uniaxial(COEFFS, lam)
    assert fd_uniaxial(COEFFS, lam) == pytest.approx(exact_u, rel=1e-6, abs=1e-3)


def test_neo_hookean_closed_form():
    nh = YeohCoefficients(1e5)
    lam = 2.0
    assert cauchy_stress_equibiaxial(nh, lam) == pytest.approx(2e5 * (lam**2 - lam**-4), rel=1e-14)


def test_prony_limits(mat):
    assert relaxation_factor(mat.prony, 0.0) == 1.0
    g_inf = 1.0 - sum(p.g for p in mat.prony)
    assert abs(relaxation_factor(mat.prony, 1e9) - g_inf) < 1e-12
    assert relaxed_coefficients(mat, 0.0) == mat.yeoh0


def test_relaxation_monotone(mat):
    t = np.geomspace(1e-3, 1e3, 50)
    phi = np.array([relaxation_factor(mat.prony, x) for x in t])
    assert np.all(np.diff(phi) < 0)


def test_relaxation_negative_time_rejected(mat):
    with pytest.raises(DomainError):
        relaxation_factor(mat.prony, -1.0)


@pytest.mark.parametrize("g,tau", [(-0.1, 1.0), (1.0, 1.0), (0.3, 0.0), (0.3, -2.0)])
def test_bad_prony_term(g, tau):
    with pytest.raises(DomainError):
        PronyTerm(g, tau)


def test_prony_sum_must_stay_below_one():
    with pytest.raises(DomainError):
        MaterialParams(COEFFS, (PronyTerm(0.6, 1.0), PronyTerm(0.5, 2.0)))


def test_yield_stretch(mat):
    assert mat.yield_stretch == 6.0


@given(lam=st.floats(1.0, 6.0), t=st.floats(0.0, 1e4))
@settings(max_examples=60, deadline=None)
def test_relaxed_stress_scales_uniformly(lam, t):
    mat = MaterialParams(COEFFS, (PronyTerm(0.4, 1.0), PronyTerm(0.3, 30.0)))
    phi = relaxation_factor(mat.prony, t)
    relaxed = cauchy_stress_equibiaxial(relaxed_coefficients(mat, t), lam)
    assert relaxed == pytest.approx(phi * cauchy_stress_equibiaxial(COEFFS, lam), rel=1e-12, abs=1e-9)


def test_config_roundtrip(tmp_path, mat):
    path = tmp_path / "m.yaml"
    dump_material(mat, path, header="test header")
    assert path.read_text().startswith("# test header\n")
    assert load_material(path) == mat


def test_config_collects_all_errors(mat):
    data = material_to_dict(mat)
    data["c10_pa"] = -1.0
    data["rel_permittivity"] = 0.5
    data["colour"] = "red"
    with pytest.raises(ConfigError) as info:
        material_from_dict(data)
    joined = " ".join(info.value.errors)
    assert "colour" in joined and "c10_pa" in joined and "rel_permittivity" in joined
    assert len(info.value.errors) == 3


def test_missing_material_file(tmp_path):
    with pytest.raises(ConfigError):
        load_material(tmp_path / "nope.yaml")


def test_default_set_labelled_non_authoritative():
    from elastoharvest.material import DEFAULT_MATERIAL_FILE

    assert "NOT AUTHORITATIVE" in DEFAULT_MATERIAL_FILE.read_text()
    assert math.isclose(load_material(DEFAULT_MATERIAL_FILE).rel_permittivity, 4.7)
