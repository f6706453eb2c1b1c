"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid configuration: bad schema, unknown family, inconsistent grid."""


class DomainError(ValueError):
    """Argument outside the domain of an operation (off-grid separation, bad p, ...)."""


class CoverageError(DomainError):
    """Snapshots do not cover the requested time window densely enough."""


class SpanError(DomainError):
    """Fit window has too few points or spans less than the required range."""


class FlatnessError(DomainError):
    """Flatness is undefined: the second structure function vanishes."""


class NumericsError(RuntimeError):
    """Numerical failure: NaN/Inf, nonpositive Cole-Hopf transform, conservation loss."""


class InstabilityError(NumericsError):
    """Time integration blew up; carries the step index where it happened."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class ResolutionWarning(UserWarning):
    """Field is not band-resolved: top-third spectral energy above threshold."""


class DiscontinuityWarning(UserWarning):
    """Initial data carries a jump; slope-based quantities use only smooth cells."""
