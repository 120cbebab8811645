"""Exception hierarchy shared by every qseries module."""


class QSeriesError(ArithmeticError):
    """Base class for numerical failures raised by qseries."""


class PoleError(QSeriesError):
    """A Gamma or Pochhammer factor sits on (or within tolerance of) a pole."""


class DivisionByVanishingFactor(PoleError):
    """A negative-index Pochhammer denominator factor vanished."""


class DivergentSeries(QSeriesError):
    """Term ratios show the series does not converge."""


class DomainError(QSeriesError, ValueError):
    """Parameters lie outside the region where a check is meaningful."""


class SamplingExhausted(QSeriesError):
    """Rejection sampling could not find an in-domain parameter vector."""


class NonFiniteError(QSeriesError):
    """An operation produced an infinite or NaN value."""
