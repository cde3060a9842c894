"""Exception hierarchy shared by every module."""


class ZcurvError(Exception):
    """Base class for all package errors."""


class ExprSyntaxError(ZcurvError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text = text
        self.position = position
        if text:
            message = f"{message} at position {position}: {text!r}"
        super().__init__(message)


class NonMonomialDivisorError(ZcurvError):
    pass


class NonIntegerExponentError(ZcurvError):
    pass


class NonLinearExponentError(ZcurvError):
    """An exponential argument is not a rational linear form in atoms."""


class InexactDivisionError(ZcurvError):
    def __init__(self, message: str, remainder=None):
        self.remainder = remainder
        if remainder is not None:
            message = f"{message}; remainder {remainder}"
        super().__init__(message)


class UnknownAtomError(ZcurvError):
    pass


class UnboundAtomError(ZcurvError):
    pass


class JetOrderError(ZcurvError):
    pass


class DegreeError(ZcurvError):
    """Mixed-degree operands or a substitution rule of the wrong degree."""


class ChartError(ZcurvError):
    pass


class FactorError(ZcurvError):
    """A residual is not a single-term multiple of the requested target."""


class EliminationError(ZcurvError):
    pass


class ProblemFileError(ZcurvError):
    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class NumericError(ZcurvError):
    pass


class ExcludedNodeError(NumericError):
    pass


class TransportOverflowError(NumericError):
    pass
