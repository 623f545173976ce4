"""Exception hierarchy shared across the package.

Statistical failures (data unsuitable for the procedure) derive from
:class:`EstimationError` so callers can distinguish them from plain usage
errors, which are raised as ``ValueError``.
"""


class GinivarError(Exception):
    """Base class for package-specific errors."""


class EstimationError(GinivarError):
    """A statistic cannot be computed from the given data."""


class SampleTooShortError(EstimationError):
    """Sample length and block exponent leave fewer than two usable blocks."""


class DegenerateBlockError(EstimationError):
    """A block has zero sample variance, so its log variance is undefined."""


class ConstantSeriesError(EstimationError):
    """All centered observations vanish; scale statistics are undefined."""


class NoiseSpecError(GinivarError):
    """Noise parameters lie outside the stationarity region."""
