"""Exception hierarchy.

Validation problems derive from :class:`ValidationError` (also a
``ValueError``); the CLI maps them to exit code 2. Numerical breakdowns
derive from :class:`NumericalError`.
"""


class RhoMixError(Exception):
    """Base class for all package errors."""


class ValidationError(RhoMixError, ValueError):
    pass


class NumericalError(RhoMixError, ArithmeticError):
    pass


class DimensionMismatch(ValidationError):
    pass


class OutOfRange(ValidationError):
    pass


class NotPositiveDefinite(ValidationError):
    pass


class NotStable(ValidationError):
    pass


class NotContractive(ValidationError):
    pass


class RankDeficientLoading(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class DegenerateInput(ValidationError):
    pass


class DegenerateBins(ValidationError):
    pass


class NotMonotone(ValidationError):
    pass


class PremiseViolated(ValidationError):
    pass


class PreconditionFailed(ValidationError):
    pass


class InfeasibleTargets(RhoMixError):
    """The generator could not meet (mu, delta, zeta) jointly."""


class NoConvergence(NumericalError):
    pass


class ConsistencyFailure(NumericalError):
    pass


class SingularDeterminant(NumericalError):
    pass


class Phi2Overflow(NumericalError, OverflowError):
    """``log(1 + phi2)`` is too large to exponentiate; see ``log_value``."""

    def __init__(self, log_value):
        super().__init__("log(1 + phi2) = %r overflows float64" % log_value)
        self.log_value = log_value
