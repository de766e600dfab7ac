"""Exception hierarchy.

Two families: ``SpecValidationError`` for malformed input (CLI exit code 1) and
``MathematicalError`` for a violated mathematical precondition (exit code 2).
Both carry an optional ``generation`` index pointing at the offending
generation / interaction point.
"""
from __future__ import annotations


class RadtreeError(Exception):
    def __init__(self, message: str, generation: int | None = None):
        super().__init__(message)
        self.generation = generation

    def __str__(self) -> str:
        msg = super().__str__()
        if self.generation is not None:
            return f"{msg} (generation {self.generation})"
        return msg


class SpecValidationError(RadtreeError, ValueError):
    """Input data does not satisfy a structural precondition."""


class MathematicalError(RadtreeError, ArithmeticError):
    """A mathematical precondition of an operation is violated."""


class DegenerateDenominator(MathematicalError):
    pass


class NonIntegerBranching(MathematicalError):
    pass


class Decoupled(MathematicalError):
    """Raised for separating interface conditions: no transfer matrix exists."""


class DegenerateFloquet(MathematicalError):
    pass


class ComplexCouplingUnsupported(MathematicalError):
    pass


class NoPeriod(SpecValidationError):
    pass


class EmptyPrefix(SpecValidationError):
    pass


class DepthTooLarge(SpecValidationError):
    pass


class EmptyBlock(SpecValidationError):
    pass


class UndefinedLetter(SpecValidationError):
    pass


class WindowTooShort(SpecValidationError):
    pass
