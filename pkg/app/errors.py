"""
Exception hierarchy shared by the services and the CLI.
"""

from app.constants import EXIT_USAGE, EXIT_RESOURCE, EXIT_INVARIANT


class ToolkitError(Exception):
    """Base class for every error raised by the toolkit."""
    exit_code = 1


class DomainError(ToolkitError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""
    exit_code = EXIT_USAGE


class PoleError(DomainError):
    """Evaluation at the pole of zeta."""


class UsageError(ToolkitError):
    """Invalid command-line configuration."""
    exit_code = EXIT_USAGE


class ResourceLimitError(ToolkitError):
    """Request exceeds a configured memory or work budget."""
    exit_code = EXIT_RESOURCE


class InvariantViolation(ToolkitError):
    """Two independent computations that must agree did not."""
    exit_code = EXIT_INVARIANT
