"""Shared exception types."""


class ParseError(ValueError):
    """Malformed operator, problem, or config text.

    Messages carry the 1-based line number of the offending line when one
    exists.
    """


class CapabilityError(RuntimeError):
    """A request exceeded the configured exact-oracle size limit."""
