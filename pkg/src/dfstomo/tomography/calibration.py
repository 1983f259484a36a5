"""Vacuum-noise scaling and local-oscillator phase assignment."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from ..errors import CalibrationError, PhaseCoverageError, PhaseIndeterminateError

MIN_VACUUM_RECORDS = 1000
DEFAULT_WINDOW = 16
# amplitude-to-stderr floor for a phase lock
LOCK_RATIO = 4.0
# false-lock probability used to widen the floor when the frequency is searched blind
LOCK_FALSE_ALARM = 1e-3


@dataclass(frozen=True)
class PhaseRamp:
    """Fitted model ``offset + amplitude * cos(omega * m + phi0)`` of the windowed means."""

    omega: float
    phi0: float
    amplitude: float
    amplitude_stderr: float
    offset: float
    window: int
    lock_threshold: float

    def phase(self, m) -> np.ndarray:
        return np.mod(self.omega * np.asarray(m, dtype=float) + self.phi0, 2.0 * math.pi)


@dataclass
class CalibratedSamples:
    """Vacuum-scaled quadratures with their assigned local-oscillator phases.

    ``theta`` is ``None`` for phase-averaged data, where no phase could (or
    needs to) be assigned.
    """

    x: np.ndarray
    theta: np.ndarray | None = None
    ramp: PhaseRamp | None = None

    def __len__(self):
        return self.x.size

    def resampled(self, idx) -> CalibratedSamples:
        return CalibratedSamples(self.x[idx], None if self.theta is None else self.theta[idx], self.ramp)


def _raw(records) -> np.ndarray:
    return np.asarray(getattr(records, "x_raw", records), dtype=float)


def scale_to_vacuum(records, vacuum_records) -> np.ndarray:
    """Scale raw readings so that the vacuum run has quadrature variance 1/2.

    Args:
        records: raw readings (array or :class:`~dfstomo.homodyne_sim.AcquisitionRun`).
        vacuum_records: vacuum run at the same local-oscillator intensity.

    Returns:
        ``raw / (sqrt(2) * std(vacuum))``.
    """
    raw = _raw(records)
    vac = _raw(vacuum_records)
    if vac.size < MIN_VACUUM_RECORDS:
        raise CalibrationError(f"vacuum run has {vac.size} records, need at least {MIN_VACUUM_RECORDS}")
    sigma = float(np.std(vac, ddof=1))
    if not math.isfinite(sigma) or sigma == 0.0:
        raise CalibrationError(f"degenerate vacuum run (std = {sigma})")
    return raw / (math.sqrt(2.0) * sigma)


def windowed_means(x: np.ndarray, window: int) -> tuple[np.ndarray, np.ndarray]:
    """Means over consecutive non-overlapping windows and the window-centre indices."""
    nw = x.size // window
    means = x[: nw * window].reshape(nw, window).mean(axis=1)
    centres = np.arange(nw) * window + 0.5 * (window - 1)
    return means, centres


def _dominant_frequency(y: np.ndarray, spacing: float) -> float:
    n = y.size
    pad = 4 * n
    spec = np.abs(np.fft.rfft(y - y.mean(), pad))
    spec[0] = 0.0
    k = int(np.argmax(spec))
    return 2.0 * math.pi * k / (pad * spacing)


def fit_phase_ramp(scaled, expected_period_hint: float | None = None, window: int | None = None) -> PhaseRamp:
    """Fit a sinusoid to the windowed means of a phase-swept record.

    The frequency is seeded from the dominant bin of the discrete spectrum of
    the windowed means (or from ``expected_period_hint``, in samples), then
    refined together with amplitude, phase and offset by least squares.

    Raises:
        PhaseIndeterminateError: when the fitted amplitude is not significant.
            Without a period hint the significance floor is raised above
            ``LOCK_RATIO`` to account for picking the largest of many spectral bins.
    """
    x = np.asarray(scaled, dtype=float)
    if window is None:
        window = max(4, int(expected_period_hint // 50)) if expected_period_hint else DEFAULT_WINDOW
    y, c = windowed_means(x, window)
    if y.size < 8:
        raise PhaseIndeterminateError(f"only {y.size} windows of {window} samples; record too short")
    cmid = 0.5 * (c[0] + c[-1])
    cc = c - cmid

    if expected_period_hint:
        omega0 = 2.0 * math.pi / float(expected_period_hint)
        n_search = 1
    else:
        omega0 = _dominant_frequency(y, window)
        n_search = max(1, y.size // 2)
    threshold = max(LOCK_RATIO, math.sqrt(2.0 * math.log(n_search / LOCK_FALSE_ALARM)))
    if omega0 == 0.0:
        raise PhaseIndeterminateError("no periodic component in the windowed means")

    basis = np.column_stack([np.cos(omega0 * cc), np.sin(omega0 * cc), np.ones_like(cc)])
    (a0, b0, off0), *_ = np.linalg.lstsq(basis, y, rcond=None)

    def resid(p):
        a, b, off, w = p
        return a * np.cos(w * cc) + b * np.sin(w * cc) + off - y

    def jac(p):
        a, b, off, w = p
        cw, sw = np.cos(w * cc), np.sin(w * cc)
        return np.column_stack([cw, sw, np.ones_like(cc), cc * (-a * sw + b * cw)])

    sol = optimize.least_squares(resid, [a0, b0, off0, omega0], jac=jac, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    a, b, off, omega = sol.x
    dof = max(1, y.size - 4)
    s2 = float(np.sum(sol.fun**2)) / dof
    J = sol.jac
    try:
        cov = s2 * np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError:
        raise PhaseIndeterminateError("singular phase fit") from None
    amp = math.hypot(a, b)
    if amp == 0.0:
        raise PhaseIndeterminateError("zero fitted amplitude")
    grad = np.array([a / amp, b / amp])
    amp_se = math.sqrt(max(0.0, float(grad @ cov[:2, :2] @ grad)))

    # a cos(wc) + b sin(wc) = amp cos(wc + phi)
    phi = math.atan2(-b, a)
    if omega < 0:
        omega, phi = -omega, -phi
    ratio = amp / amp_se if amp_se > 0 else math.inf
    if ratio < threshold:
        raise PhaseIndeterminateError(
            f"phase pattern amplitude {amp:.3g} is only {ratio:.2f} standard errors (need {threshold:.2f})"
        )
    phi0 = math.remainder(phi - omega * cmid, 2.0 * math.pi)
    return PhaseRamp(float(omega), float(phi0), float(amp), float(amp_se), float(off), int(window), float(threshold))


def assign_phases(scaled, expected_period_hint: float | None = None, window: int | None = None) -> CalibratedSamples:
    """Attach linear-ramp phases ``theta_m = omega*m + phi0 (mod 2 pi)`` to scaled samples.

    The phase origin is the direction of the displacement, so a displaced
    state ends up on the positive X axis.
    """
    x = np.asarray(scaled, dtype=float)
    ramp = fit_phase_ramp(x, expected_period_hint, window)
    return CalibratedSamples(x, ramp.phase(np.arange(x.size)), ramp)


def check_phase_coverage(theta, bins: int = 10) -> None:
    """Raise :class:`PhaseCoverageError` if any of ``bins`` equal slices of ``[0, pi)`` is empty."""
    if theta is None:
        raise PhaseCoverageError("samples carry no phase information")
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise PhaseCoverageError("no samples")
    counts, _ = np.histogram(np.mod(theta, math.pi), bins=bins, range=(0.0, math.pi))
    if np.any(counts == 0):
        empty = np.flatnonzero(counts == 0).tolist()
        raise PhaseCoverageError(f"phase slices {empty} of {bins} over [0, pi) hold no samples")
