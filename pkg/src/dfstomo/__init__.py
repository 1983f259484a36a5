"""Homodyne tomography of displaced Fock states.

Subpackages and modules:

* :mod:`dfstomo.states`: state models and closed-form references.
* :mod:`dfstomo.homodyne_sim`: simulated homodyne acquisition runs.
* :mod:`dfstomo.tomography`: calibration, back-projection, Abel inversion, pattern functions.
* :mod:`dfstomo.analysis`: parameter fits, negativity and photon-number peaks.
* :mod:`dfstomo.cli`: the ``dfstomo`` command.
"""

from .errors import (
    CalibrationError,
    ConfigError,
    DFSTomoError,
    ExtrapolationError,
    GridMismatchError,
    InadequateDimensionError,
    PhaseCoverageError,
    PhaseIndeterminateError,
    RecordFormatError,
    TruncationError,
    TruncationWarning,
    UnsupportedOrderError,
)
from .states import StateModel, photon_statistics, wigner_analytic

__version__ = "0.1.0"

__all__ = [
    "CalibrationError",
    "ConfigError",
    "DFSTomoError",
    "ExtrapolationError",
    "GridMismatchError",
    "InadequateDimensionError",
    "PhaseCoverageError",
    "PhaseIndeterminateError",
    "RecordFormatError",
    "StateModel",
    "TruncationError",
    "TruncationWarning",
    "UnsupportedOrderError",
    "photon_statistics",
    "wigner_analytic",
]
