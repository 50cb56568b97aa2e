"""Exception taxonomy shared by all randcrit modules."""


class RandcritError(Exception):
    """Base class for all randcrit errors."""


class ShapeError(RandcritError, ValueError):
    """Dimension / shape mismatch between inputs."""


class ParameterError(RandcritError, ValueError):
    """Invalid parameter values (e.g. positivity conditions violated)."""


class DegeneracyError(RandcritError, ValueError):
    """A covariance that must be invertible is (numerically) singular."""


class NumericError(RandcritError, RuntimeError):
    """A numerical routine (quadrature, iteration) failed to converge."""


class UnsupportedError(RandcritError, ValueError):
    """The requested case is outside what this implementation supports."""
