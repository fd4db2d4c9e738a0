class EntroboundError(Exception):
    pass


class SpecParseError(EntroboundError, ValueError):
    """Malformed measure descriptor; ``position`` indexes the bad token."""

    def __init__(self, message, spec, position, token=None):
        self.spec = spec
        self.position = position
        self.token = token
        super().__init__(f"{message} at position {position} in {spec!r}")


class DegenerateMeasureError(EntroboundError, ValueError):
    pass


class DomainError(EntroboundError, ValueError):
    pass


class PreconditionError(EntroboundError, ValueError):
    pass


class ConfigError(EntroboundError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
