"""Exception hierarchy shared across the package."""


class AqociError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(AqociError):
    """A vector or matrix has the wrong length/shape for the operation."""


class OracleSizeError(AqociError):
    """Brute-force enumeration requested beyond the supported variable count."""


class RangeError(AqociError):
    """A numeric argument is outside its documented range."""


class LayoutError(AqociError):
    """Variable layout and problem description disagree."""


class DegreeError(AqociError):
    """Polynomial degree exceeds what the reduction supports."""


class ParseError(AqociError):
    """Malformed input file (message carries the offending line number)."""


class ConfigurationError(AqociError):
    """Invalid or inconsistent run configuration."""


class SolverError(AqociError):
    """A sampler failed (remote transport, protocol, or backend error)."""


class EnergyMismatchError(SolverError):
    """Remote solver reported energies that do not match local evaluation."""


class UndefinedMetricError(AqociError):
    """Metric is undefined for the given labeling (e.g. a single cluster)."""
