"""Core utilities: configuration, logging, math primitives and the network graph."""

from .config import settings
from .exceptions import (
    CheckpointError,
    ConfigurationError,
    DomainError,
    FitError,
    PreconditionError,
    SimulationError,
)

__all__ = [
    "settings",
    "SimulationError",
    "DomainError",
    "ConfigurationError",
    "PreconditionError",
    "FitError",
    "CheckpointError",
]
