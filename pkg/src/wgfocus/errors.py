"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
numeric/metric failures exit 3, file-format and OS errors exit 4.
"""


class ConfigurationError(ValueError):
    """A scenario/config value is missing, unknown, or inconsistent."""


class EvanescentFrequencyError(ValueError):
    """A frequency at or below the waveguide cutoff was queried.

    The dispersion model covers propagating TE10 fields only; below the
    cutoff the wavenumber is imaginary.
    """


class WindowingError(RuntimeError):
    """Signal energy reached the edge of the time window.

    Raised when synthesis or propagation would wrap around the discrete
    grid; the fix is a wider window, not a tolerance change.
    """


class AliasingError(ValueError):
    """A resampling rate below the band-limit safety factor was requested."""


class IntegrationError(RuntimeError):
    """The ODE integrator failed to converge."""


class MetricError(RuntimeError):
    """A pulse/map metric is undefined on the given data."""


class UnboundedWidthError(MetricError):
    """FWHM undefined: the curve never falls to half maximum on one side."""


class NoRevivalError(MetricError):
    """No ground-state revival above the off-focus baseline."""


class NoContrastError(MetricError):
    """Degenerate population map: no amplitude produces contrast."""


class FileFormatError(Exception):
    """A data file does not match the documented external format."""
