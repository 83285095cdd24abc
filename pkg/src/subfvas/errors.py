"""Exception hierarchy. Each class maps onto one CLI exit code."""


class SubfvasError(Exception):
    exit_code = 1


class DomainError(SubfvasError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    exit_code = 2


class UnsupportedParameterError(DomainError):
    """Hurst index valid in general but not supported by this operation."""


class ArgumentError(SubfvasError, ValueError):
    """Malformed or inconsistent arguments (lengths, missing inputs)."""

    exit_code = 2


class ConfigError(SubfvasError):
    exit_code = 2


class NumericalError(SubfvasError, ArithmeticError):
    """Factorization or evaluation failed numerically."""

    exit_code = 3


class NonIdentifiableError(SubfvasError):
    """Data carry no information about the requested parameter."""

    exit_code = 4


class DegenerateHorizonError(NonIdentifiableError):
    pass


class ExperimentError(SubfvasError):
    """Too many replications failed. The partial report is attached."""

    exit_code = 5

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
