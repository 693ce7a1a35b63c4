import numpy as np
import pytest

from elastoharvest.errors import ConfigError, DomainError
from elastoharvest.material import EPSILON_0
from elastoharvest.membrane import (
    MembraneGeometry,
    StretchState,
    area_at,
    capacitance,
    field_from_voltage,
    geometry_from_dict,
    leakage_resistance,
    maxwell_stress,
    thickness_at,
)


def test_capacitance_reference_film(ref_geom):
    # 1 cm x 1 cm x 62.5 um once stretched by 4
    c = capacitance(ref_geom, 4.7, 4.0)
    assert c == pytest.approx(EPSILON_0 * 4.7 * 1e-4 / 62.5e-6, rel=1e-12)


@pytest.mark.parametrize("lam", [1.0, 2.0, 4.0, 6.0])
def test_volume_conserved(ref_geom, lam):
    assert area_at(ref_geom, lam) * thickness_at(ref_geom, lam) == pytest.approx(ref_geom.volume, rel=1e-12)


@pytest.mark.parametrize("lam", [1.0, 2.5, 4.0, 5.5])
def test_rc_product_is_material_constant(ref_geom, lam):
    rho = 1e13
    rc = leakage_resistance(ref_geom, rho, lam) * capacitance(ref_geom, 4.7, lam)
    assert rc == pytest.approx(rho * EPSILON_0 * 4.7, rel=1e-12)


def test_maxwell_stress():
    assert maxwell_stress(4.7, 1e8) == pytest.approx(EPSILON_0 * 4.7 * 1e16)


def test_field_from_voltage():
    assert field_from_voltage(2000.0, 62.5e-6) == pytest.approx(3.2e7)
    with pytest.raises(DomainError):
        field_from_voltage(1.0, 0.0)


def test_vectorized_capacitance(ref_geom):
    lam = np.array([1.0, 2.0, 4.0])
    c = capacitance(ref_geom, 4.7, lam)
    assert c.shape == (3,)
    assert np.allclose(c / c[0], lam**4)


def test_stretch_state():
    s = StretchState(4.0, 1.5)
    assert s.lam_total == 6.0
    assert s.thickness_stretch == pytest.approx(1 / 36)
    with pytest.raises(DomainError):
        StretchState(0.0)


def test_geometry_rejects_negative_thickness():
    with pytest.raises(ConfigError) as info:
        geometry_from_dict({"x10_m": 1e-2, "x20_m": 1e-2, "x30_m": -1})
    assert any("x30_m" in e for e in info.value.errors)


def test_geometry_collects_errors():
    with pytest.raises(ConfigError) as info:
        geometry_from_dict({"x10_m": 0, "x30_m": -1, "depth": 3})
    assert len(info.value.errors) == 4


def test_geometry_dataclass_validation():
    with pytest.raises(DomainError):
        MembraneGeometry(1e-2, 1e-2, 0.0)
