"""
Exception hierarchy for densitometer.

Everything derives from ValueError so callers that only know about
ValueError keep working; the CLI maps this family to exit code 2.
"""


class DensitometerError(ValueError):
    """Base class for all validation failures raised by the package."""


class ConfigError(DensitometerError):
    """An environment or CLI setting has an invalid value."""


class DomainError(DensitometerError):
    """An input lies outside the range where an operation is defined."""


class GraphFormatError(DensitometerError):
    """A graph description is empty, ragged, or references unknown vertices."""


class CapExceededError(DensitometerError):
    """A size cap (closure, dense limit, step horizon) was hit."""


class ChainNotMixingError(DensitometerError):
    """The walk is reducible or periodic, so the uniform law is never approached."""
