from pathlib import Path
import sys

import pytest

from elastoharvest.material import MaterialParams, YeohCoefficients, default_material
from elastoharvest.membrane import MembraneGeometry

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"


@pytest.fixture(scope="session")
def mat():
    return default_material()


@pytest.fixture(scope="session")
def neo_hookean():
    # c20 = c30 = 0, no relaxation
    return MaterialParams(YeohCoefficients(69300.0), ())


@pytest.fixture(scope="session")
def ref_geom():
    """2.5 mm x 2.5 mm x 1 mm reference film, 6 mg lumped mass."""
    return MembraneGeometry(2.5e-3, 2.5e-3, 1e-3, 6e-6)


@pytest.fixture(scope="session")
def cm_geom():
    return MembraneGeometry(1e-2, 1e-2, 1e-3, 9.6e-5)


@pytest.fixture
def configs():
    return CONFIGS


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.pytest_terminal_summary_lines():
        terminalreporter.write_line(line)
