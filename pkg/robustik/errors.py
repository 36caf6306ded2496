"""
Exception hierarchy for robustik.

Every error carries the process exit code the CLI reports for it.
"""


class RobustIKError(Exception):
    """Base class for all robustik errors."""

    exit_code = 1


class InvalidArgumentError(RobustIKError, ValueError):
    """An operation precondition was violated."""

    exit_code = 2


class ConfigError(RobustIKError):
    """A model, task, noise or pairs file could not be read or validated."""

    exit_code = 2


class NoSolutionError(RobustIKError):
    """No IK candidates were available for selection."""

    exit_code = 3


class NumericalError(RobustIKError):
    """A computation produced non-finite values."""

    exit_code = 4
