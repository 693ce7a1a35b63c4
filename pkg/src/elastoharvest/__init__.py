"""Simulation and design optimization of dielectric-elastomer energy scavengers."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConfigError,
    DomainError,
    ElastoHarvestError,
    EstimationError,
    FitError,
    IdentifiabilityError,
    InfeasibleDesignError,
    NumericalError,
)
from .material import (  # noqa: E402
    EPSILON_0,
    MaterialParams,
    PronyTerm,
    YeohCoefficients,
    default_material,
    load_material,
)
from .membrane import MembraneGeometry, StretchState  # noqa: E402
from .failure import DesignPoint, OperatingEnvelope, Verdict  # noqa: E402
from .cycle import CycleMode, CycleResult, CycleSpec, run_quasistatic_cycle  # noqa: E402
