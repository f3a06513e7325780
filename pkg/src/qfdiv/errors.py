"""Exception types shared across the package.

Everything derives from QfdivError (a ValueError) so callers can catch the
whole family at once; the CLI maps them to exit code 3.
"""


class QfdivError(ValueError):
    """Base class for all numeric/domain errors raised by qfdiv."""


class DimensionMismatch(QfdivError):
    """Operands have incompatible shapes."""


class InvalidOperator(QfdivError):
    """Input matrix violates a structural requirement (square, Hermitian, ...)."""


class NotPSD(QfdivError):
    """Matrix has a negative eigenvalue beyond tolerance."""


class DomainError(QfdivError):
    """A scalar function was evaluated outside its domain."""


class SupportError(QfdivError):
    """A support-inclusion precondition does not hold."""


class ZeroSigma(QfdivError):
    """The second argument of a divergence is the zero operator."""


class UnsupportedGenerator(QfdivError):
    """Generator name/parameter outside the validated operator-convex range."""


class MissingRecession(QfdivError):
    """A user-supplied generator did not declare its recession constant."""


class InvalidDistribution(QfdivError):
    """Weight vector has negative entries or mismatched length."""


class StepError(QfdivError):
    """A finite-difference step leaves the PSD cone."""


class InfiniteDivergence(QfdivError):
    """An operation requires finite divergence values."""


class NonCommuting(QfdivError):
    """The classical oracle was called on a non-commuting pair."""
