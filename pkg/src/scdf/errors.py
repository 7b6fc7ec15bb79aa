"""Exception hierarchy shared across the package.

Each class carries a short machine-readable ``code`` and the CLI exit status
it maps to.
"""


class ScdfError(Exception):
    code = "ERROR"
    exit_status = 1


class ConfigError(ScdfError, ValueError):
    """Invalid system configuration; ``field`` names the offending entry."""

    code = "CONFIG_ERROR"
    exit_status = 2

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class NumericalError(ScdfError, ArithmeticError):
    code = "NUMERICAL_FAILURE"
    exit_status = 3


class InfeasibleError(NumericalError):
    code = "INFEASIBLE"


class ResourceError(NumericalError):
    code = "RESOURCE_LIMIT"


class UnsupportedError(ScdfError):
    code = "UNSUPPORTED"
    exit_status = 4
