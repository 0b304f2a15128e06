"""
Error types raised by the workbench.

All errors derive from ValueError. The SKIPPABLE group marks errors that
turn a verification cell into a skipped verdict.
"""

from typing import Optional


class WorkbenchError(ValueError):
    pass


class DivisionByZero(WorkbenchError):
    pass


class EvaluationAtPole(WorkbenchError):
    pass


class ContextMismatch(WorkbenchError):
    pass


class NegativeIndex(WorkbenchError):
    pass


class IndexOutOfRange(WorkbenchError):
    pass


class UnknownPreset(WorkbenchError):
    pass


class InvalidDeformation(WorkbenchError):
    pass


class MissingTauFactorization(WorkbenchError):
    pass


class MixedParity(WorkbenchError):
    pass


class DegenerateWeights(WorkbenchError):
    pass


class SingularPrefactor(WorkbenchError):
    pass


class UnsupportedArity(WorkbenchError):
    pass


class TruncationExceeded(WorkbenchError):
    pass


class ConfigError(WorkbenchError):
    pass


class ExpressionParseError(WorkbenchError):
    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


# Errors that make a verification cell undefined rather than wrong.
SKIPPABLE = (DegenerateWeights, SingularPrefactor, MissingTauFactorization, TruncationExceeded)
