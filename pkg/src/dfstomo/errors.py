"""Exception types raised across the package."""


class DFSTomoError(Exception):
    """Base class for all package errors."""


class ConfigError(DFSTomoError, ValueError):
    """Invalid state description, acquisition setting or run configuration."""


class UnsupportedOrderError(DFSTomoError, ValueError):
    """Requested photon number / polynomial order is outside the supported range."""


class TruncationError(DFSTomoError, RuntimeError):
    """A truncated Fock basis lost more probability mass than allowed."""


class TruncationWarning(UserWarning):
    """Probability mass beyond the requested cutoff exceeds the reporting bound."""


class CalibrationError(DFSTomoError, RuntimeError):
    """Vacuum calibration could not be performed."""


class PhaseCoverageError(DFSTomoError, RuntimeError):
    """Local-oscillator phases do not cover the circle well enough."""


class PhaseIndeterminateError(DFSTomoError, RuntimeError):
    """The record shows no significant periodic pattern to lock the phase to."""


class ExtrapolationError(DFSTomoError, ValueError):
    """A tabulated function was asked for a value outside its table."""


class GridMismatchError(DFSTomoError, ValueError):
    """Two reconstructions are defined on different grids."""


class InadequateDimensionError(DFSTomoError, ValueError):
    """Fock-basis cutoff too small for the requested displacement."""


class RecordFormatError(DFSTomoError, ValueError):
    """A record or sidecar file does not follow the expected layout."""
