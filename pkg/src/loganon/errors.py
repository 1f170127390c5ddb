"""Exception hierarchy.  Each class maps to one CLI exit code."""


class AnonError(Exception):
    exit_code = 1


class ConfigurationError(AnonError):
    """Bad configuration detected while building engine state."""

    exit_code = 3


class PolicyError(AnonError):
    """Invalid policy option values or unusable key material."""

    exit_code = 3


class PolicyParseError(PolicyError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class PolicyValidationError(PolicyError):
    """Carries every diagnostic found, not just the first."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(str(d) for d in self.diagnostics)
        super().__init__(f"policy rejected: {lines}")


class PlanError(PolicyError):
    """Validated policy that still cannot be compiled (cross-field references)."""


class ModuleLoadError(AnonError):
    exit_code = 4


class DataSetError(AnonError):
    exit_code = 4


class CapabilityError(AnonError):
    exit_code = 5


class RecordError(AnonError):
    """A single record failed to parse or serialize."""

    exit_code = 6

    def __init__(self, message: str, raw: str | None = None, lineno: int | None = None):
        self.raw = raw
        self.lineno = lineno
        where = f"record {lineno}: " if lineno is not None else ""
        super().__init__(where + message)


class RunError(AnonError):
    """Failure while anonymizing, e.g. exhausted value space or timestamp overflow."""

    exit_code = 7


class ContractError(AnonError):
    """Module API used out of order (read past end, reset on a stream)."""

    exit_code = 7
