"""Exception hierarchy.

Input problems derive from :class:`ValidationError`, numerical breakdowns from
:class:`NumericError`; the CLI maps them to exit codes 2 and 3.
"""


class SymHinfError(Exception):
    pass


class ValidationError(SymHinfError, ValueError):
    pass


class NumericError(SymHinfError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotSymmetric(ValidationError):
    pass


class NotHurwitz(ValidationError):
    pass


class ParseError(ValidationError):
    pass


class InadmissibleWeights(ValidationError):
    pass


class IncompatibleInputWidths(ValidationError):
    pass


class NotDiagonalA(ValidationError):
    pass


class SingularStateMatrix(NumericError):
    pass


class NotStable(NumericError):
    pass


class UnstableClosedLoop(NotStable):
    pass


class NoConvergence(NumericError):
    pass


class NoStabilizingSolution(NumericError):
    pass


class IllConditionedSubspace(NumericError):
    pass


class NonFiniteResult(NumericError):
    pass


class ConsistencyViolation(NumericError):
    """Two routes that must agree did not (e.g. monotone feasibility in gamma)."""
