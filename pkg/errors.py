"""
Exception hierarchy for the real-algebra toolkit
"""

from typing import Optional, Sequence


class ToolkitError(Exception):
    """Base class for input and precondition errors"""


class DimensionError(ToolkitError, ValueError):
    pass


class SymmetryError(ToolkitError, ValueError):
    pass


class ParseError(ToolkitError, ValueError):
    """Syntax error in a text payload, with the offending position"""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariableError(ParseError):
    pass


class DegreeError(ToolkitError, ValueError):
    pass


class NotMonicError(ToolkitError, ValueError):
    pass


class EmptyFormError(ToolkitError, ValueError):
    pass


class UndefinedCountError(ToolkitError, ValueError):
    pass


class PreconditionError(ToolkitError, ValueError):
    pass


class CertificateError(ToolkitError, ValueError):
    pass


class NoGramError(ToolkitError, ValueError):
    """The coefficient-matching system of a Gram family is inconsistent"""


class InputError(ToolkitError, ValueError):
    pass


class ConsistencyError(ToolkitError, ArithmeticError):
    """An exact identity that must hold by construction failed"""


class SpanError(ToolkitError, ValueError):
    """The target lies outside the span of the generators.

    `functional` vanishes on every generator and is -1 on the target.
    """

    def __init__(self, message: str, functional: Optional[Sequence] = None):
        super().__init__(message)
        self.functional = functional


class NumericFailure(Exception):
    """The floating-point phase did not produce a usable answer"""
