class SkewCertError(Exception):
    """Base class for every error raised by the toolkit."""


class InvariantViolation(SkewCertError, ValueError):
    """A value does not satisfy the invariants of its type."""

    def __init__(self, kind: str, detail: str = ""):
        self.kind = kind
        self.detail = detail
        super().__init__(f"{kind}: {detail}" if detail else kind)


class PreconditionError(SkewCertError, ValueError):
    """An operation was called outside of its domain."""


class BudgetExceeded(SkewCertError):
    """A search or enumeration hit its configured size guard."""

    def __init__(self, message: str, explored: int = 0):
        self.explored = explored
        super().__init__(message)


class SchemaError(SkewCertError, ValueError):
    """A JSON document is malformed; `field` names the offending field."""

    def __init__(self, field: str, detail: str):
        self.field = field
        super().__init__(f"field '{field}': {detail}")


class ConfigError(SkewCertError):
    """The configuration file could not be loaded or is inconsistent."""
