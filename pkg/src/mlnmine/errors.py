"""Exception hierarchy shared by the whole package.

The CLI maps these onto exit codes: usage or configuration problems exit
with 2, input and load problems with 3, violated runtime contracts with 4.
"""


class MiningError(Exception):
    """Base class for every error raised by this package."""


class ParseError(MiningError):
    """An edge-list line could not be parsed."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class ValidationError(MiningError):
    """Input breaks a structural rule (self-loop, duplicate edge, bad label)."""


class ConfigError(MiningError):
    """A configuration value is out of range or inconsistent."""


class ContractViolation(MiningError):
    """An operation was invoked outside its documented preconditions."""


class RoutingError(ContractViolation):
    """A vertex ID fell outside every partition range."""
