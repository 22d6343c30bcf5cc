"""Exception types raised by the solvers and the harness."""


class QdlError(Exception):
    """Base class for all package errors."""


class DomainError(QdlError, ValueError):
    """Argument outside the domain of a function."""


class InvalidAmplitudesError(QdlError, ValueError):
    pass


class HermiticityError(QdlError, ValueError):
    pass


class PoleError(QdlError, ZeroDivisionError):
    pass


class ConditioningError(QdlError, ArithmeticError):
    pass


class UnsupportedParametersError(QdlError, ValueError):
    pass


class StiffnessError(QdlError, RuntimeError):
    """Adaptive step size collapsed or the step budget ran out."""


class MissingHistoryError(QdlError, ValueError):
    pass


class HistoryOverflowError(QdlError, MemoryError):
    pass


class ConfigError(QdlError, ValueError):
    pass
