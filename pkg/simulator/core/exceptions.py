"""
Exception hierarchy for the estimation simulator.

Every error raised on purpose by the library derives from SimulationError so
the CLI can turn it into a clean exit status.
"""

from typing import Iterable, List, Optional


class SimulationError(Exception):
    """Base class for all library errors."""


class DomainError(SimulationError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ConfigurationError(SimulationError, ValueError):
    """Invalid configuration value; `fields` names the offending entries."""

    def __init__(self, message: str, fields: Optional[Iterable[str]] = None):
        self.fields: List[str] = list(fields or [])
        if self.fields:
            message = f"{message} [fields: {', '.join(self.fields)}]"
        super().__init__(message)


class PreconditionError(SimulationError):
    """A documented precondition (connectivity, positive bounds) fails."""


class FitError(SimulationError, ValueError):
    """A log-log fit cannot be computed from the given series."""


class CheckpointError(SimulationError, KeyError):
    """Requested step was not recorded as a checkpoint."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
