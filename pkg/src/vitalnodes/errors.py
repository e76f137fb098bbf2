"""Exception hierarchy; the CLI maps these to process exit codes."""


class VitalnodesError(Exception):
    """Base class for toolkit errors."""

    exit_code = 1


class UsageError(VitalnodesError):
    """Bad arguments, unknown method names, inconsistent configuration."""

    exit_code = 1


class DataError(VitalnodesError):
    """Malformed or missing input data."""

    exit_code = 2


class NumericError(VitalnodesError):
    """Numerical failure, e.g. a NaN loss during training."""

    exit_code = 3
