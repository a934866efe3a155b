from .exceptions import (
    CapExceededError,
    ContractLabError,
    DimensionError,
    GadgetConstructionError,
    InstanceParseError,
    InvalidInstanceError,
    PreconditionError,
    PropertyViolationError,
    StorageError,
    UnknownSuiteError,
)
from .logging import setup_logging

__all__ = [
    "CapExceededError",
    "ContractLabError",
    "DimensionError",
    "GadgetConstructionError",
    "InstanceParseError",
    "InvalidInstanceError",
    "PreconditionError",
    "PropertyViolationError",
    "StorageError",
    "UnknownSuiteError",
    "setup_logging",
]
