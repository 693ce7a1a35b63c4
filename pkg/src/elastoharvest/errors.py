"""Exception hierarchy shared by every module.

Each error carries a process exit status used by the command-line runner.
"""


class ElastoHarvestError(Exception):
    exit_code = 1


class DomainError(ElastoHarvestError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 2


class ConfigError(ElastoHarvestError, ValueError):
    """Invalid configuration; ``errors`` lists every problem found."""

    exit_code = 2

    def __init__(self, errors):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class InfeasibleDesignError(ElastoHarvestError):
    """A design point violates a failure criterion."""

    exit_code = 3

    def __init__(self, message, criterion=None, counts=None):
        super().__init__(message)
        self.criterion = criterion
        self.counts = dict(counts or {})


class NumericalError(ElastoHarvestError):
    exit_code = 4


class IdentifiabilityError(NumericalError):
    """Test data carry too little information to identify the parameters."""


class FitError(NumericalError):
    def __init__(self, message, best_unconstrained_residual=None):
        super().__init__(message)
        self.best_unconstrained_residual = best_unconstrained_residual


class EstimationError(NumericalError):
    """Capacitance could not be recovered from a measurement window."""
