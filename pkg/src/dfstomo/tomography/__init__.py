"""From raw homodyne records to Wigner functions and photon-number estimates."""

from .abel import RadialProfile, reconstruct_wigner_abel, silverman_bandwidth, wigner_abel_at
from .calibration import (
    CalibratedSamples,
    PhaseRamp,
    assign_phases,
    check_phase_coverage,
    fit_phase_ramp,
    scale_to_vacuum,
    windowed_means,
)
from .fbp import (
    DEFAULT_KC,
    GridAxis,
    WignerGrid,
    fbp_kernel,
    fbp_point_values,
    reconstruct_wigner_fbp,
    wigner_fbp_at,
)
from .patterns import PATTERN_N_MAX, DiagonalEstimate, estimate_diagonals, pattern_function, pattern_matrix

__all__ = [
    "CalibratedSamples",
    "DEFAULT_KC",
    "DiagonalEstimate",
    "GridAxis",
    "PATTERN_N_MAX",
    "PhaseRamp",
    "RadialProfile",
    "WignerGrid",
    "assign_phases",
    "check_phase_coverage",
    "estimate_diagonals",
    "fbp_kernel",
    "fbp_point_values",
    "fit_phase_ramp",
    "pattern_function",
    "pattern_matrix",
    "reconstruct_wigner_abel",
    "reconstruct_wigner_fbp",
    "scale_to_vacuum",
    "silverman_bandwidth",
    "wigner_abel_at",
    "wigner_fbp_at",
    "windowed_means",
]
