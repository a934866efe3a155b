"""
Custom exceptions for the toolkit.
"""


class ContractLabError(Exception):
    """Base class for every toolkit error."""
    pass


class DimensionError(ContractLabError):
    """Raised when a set, cost vector or price vector does not match the ground set."""
    pass


class PreconditionError(ContractLabError):
    """Raised when an operation's precondition does not hold."""
    pass


class CapExceededError(ContractLabError):
    """Raised when an exhaustive operation would exceed its configured cap."""
    pass


class GadgetConstructionError(ContractLabError):
    """Raised when a gadget or structured instance cannot be built from its inputs."""
    pass


class InstanceParseError(ContractLabError):
    """Raised when a JSON document cannot be read or validated."""
    pass


class StorageError(ContractLabError):
    """Raised when reading from or writing to local disk or GCS fails."""
    pass


class UnknownSuiteError(ContractLabError):
    """Raised when a verification suite name is not registered."""
    pass


class PropertyViolationError(ContractLabError):
    """Raised when a verification run reports at least one failed check."""
    pass


class InvalidInstanceError(ContractLabError):
    """Raised when a set function or contract instance violates its invariants."""
    pass
