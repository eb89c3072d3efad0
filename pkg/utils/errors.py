"""
Exception hierarchy for the eigenbasis toolkit
"""
from typing import Optional, Tuple


class EllipticModelError(Exception):
    """Base class for all toolkit errors"""


class DomainError(EllipticModelError, ValueError):
    """Input outside the domain of an operation"""


class ParameterError(DomainError):
    """Coupling parameters failed validation"""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class BranchError(EllipticModelError):
    """Generic coefficients requested where c_r has a pole (g = 0 or 1)"""


class PoleError(EllipticModelError, ZeroDivisionError):
    """A theta bracket in a denominator vanishes"""


class NumericError(EllipticModelError, ArithmeticError):
    """A numerical routine missed its residual target"""

    def __init__(self, message: str, diagnostics: Optional[dict] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConditioningError(NumericError):
    """Projector product is too ill-conditioned to trust"""

    def __init__(self, message: str, amplification: float):
        super().__init__(message, {'amplification': amplification})
        self.amplification = amplification


class LabelingError(EllipticModelError):
    """Continuation in p could not carry eigenvalue labels"""

    def __init__(self, message: str, p: Optional[float] = None,
                 pair: Optional[Tuple[int, int]] = None):
        super().__init__(message)
        self.p = p
        self.pair = pair


class DegeneracyError(EllipticModelError):
    """Spectrum or determinant degenerate within tolerance"""
