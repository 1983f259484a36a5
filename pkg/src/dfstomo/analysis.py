"""Parameter fits, negativity significance and photon-number peak structure."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ._bootstrap import bootstrap_means
from .errors import ConfigError, GridMismatchError, PhaseIndeterminateError, TruncationWarning
from .states import StateModel, photon_statistics, wigner_analytic
from .tomography.abel import RadialProfile, wigner_abel_at
from .tomography.calibration import DEFAULT_WINDOW, CalibratedSamples, windowed_means
from .tomography.fbp import WignerGrid, fbp_point_values
from .tomography.patterns import DiagonalEstimate

BASE_ETA = 0.62
# effective-efficiency loss from detector noise at large displacement
EFFICIENCY_REDUCTION = {1.3: 0.02, 2.4: 0.10}
NEGATIVITY_Z = 3.0
NEGATIVITY_RADIUS = 1.0


@dataclass(frozen=True)
class Scenario:
    name: str
    state: StateModel
    theta_step: float | None  # None: keep the simulator default sweep
    effective_eta: float | None = None
    description: str = ""


def _fig4(alpha: float) -> Scenario:
    return Scenario(
        f"fig4_a{alpha}",
        StateModel.displaced_mix(alpha, BASE_ETA),
        None,
        round(BASE_ETA - EFFICIENCY_REDUCTION[alpha], 10),
        f"displaced single photon, alpha={alpha}, effective eta lowered by {EFFICIENCY_REDUCTION[alpha]}",
    )


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario("fig3a", StateModel.vacuum(), 0.0, description="vacuum, both inputs blocked"),
        Scenario("fig3b", StateModel.coherent(0.60), None, description="coherent state alpha=0.60"),
        Scenario("fig3c", StateModel.displaced_mix(0.0, BASE_ETA), 0.0, description="single photon with vacuum admixture"),
        Scenario("fig3d", StateModel.displaced_mix(0.60, BASE_ETA), None, description="displaced single photon, alpha=0.60"),
        _fig4(1.3),
        _fig4(2.4),
    ]
}


@dataclass(frozen=True)
class AlphaFit:
    alpha_abs: float
    alpha_phase: float
    stderr_abs: float
    stderr_phase: float


@dataclass(frozen=True)
class FitReport:
    alpha_abs: float
    alpha_phase: float
    eta: float
    stderr_alpha_abs: float
    stderr_alpha_phase: float
    stderr_eta: float
    phase_indeterminate: bool = False

    @property
    def eta_out_of_range(self) -> bool:
        return not 0.0 <= self.eta <= 1.0

    def to_dict(self) -> dict:
        return {
            "alpha_abs": self.alpha_abs,
            "alpha_phase_rad": self.alpha_phase,
            "eta": self.eta,
            "stderr_alpha_abs": self.stderr_alpha_abs,
            "stderr_alpha_phase_rad": self.stderr_alpha_phase,
            "stderr_eta": self.stderr_eta,
            "eta_out_of_range": self.eta_out_of_range,
            "phase_indeterminate": self.phase_indeterminate,
        }


@dataclass(frozen=True)
class NegativityReport:
    min_value: float
    loc_x: float
    loc_p: float
    z_score: float
    stderr: float

    def significant(self, z_crit: float = NEGATIVITY_Z) -> bool:
        return self.z_score <= -z_crit

    def to_dict(self) -> dict:
        return {"min_w": self.min_value, "loc_x": self.loc_x, "loc_p": self.loc_p, "z": self.z_score, "stderr_min_w": self.stderr}


@dataclass(frozen=True)
class PeakReport:
    positions: list[int]
    dips: list[int] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.positions)

    def to_dict(self) -> dict:
        return {"peaks": self.count, "peak_positions": list(self.positions), "dip_positions": list(self.dips)}


def fit_alpha(samples: CalibratedSamples, window: int | None = None) -> AlphaFit:
    """Least-squares fit of windowed quadrature means to ``sqrt(2)|alpha| cos(theta - phi)``.

    Window means of ``cos(theta)`` and ``sin(theta)`` serve as regressors, so
    the finite window length causes no amplitude bias.
    """
    if samples.theta is None:
        raise PhaseIndeterminateError("no phases assigned; displacement cannot be fitted")
    if window is None:
        window = samples.ramp.window if samples.ramp is not None else DEFAULT_WINDOW
    y, _ = windowed_means(samples.x, window)
    cw, _ = windowed_means(np.cos(samples.theta), window)
    sw, _ = windowed_means(np.sin(samples.theta), window)
    A = np.column_stack([cw, sw])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    s2 = float(resid @ resid) / max(1, y.size - 2)
    cov = s2 * np.linalg.inv(A.T @ A)
    a, b = coef
    amp = math.hypot(a, b)
    if amp > 0:
        g_abs = np.array([a, b]) / amp
        g_phase = np.array([-b, a]) / amp**2
        se_abs = math.sqrt(float(g_abs @ cov @ g_abs))
        se_phase = math.sqrt(float(g_phase @ cov @ g_phase))
    else:
        se_abs = math.sqrt(0.5 * float(np.trace(cov)))
        se_phase = math.pi
    r2 = math.sqrt(2.0)
    return AlphaFit(amp / r2, math.atan2(b, a), se_abs / r2, se_phase)


def fit_eta(
    samples: CalibratedSamples,
    alpha_abs: float = 0.0,
    alpha_phase: float = 0.0,
    bootstrap_reps: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> tuple[float, float]:
    """Efficiency from the variance of the de-displaced quadratures.

    For ``eta|1><1| + (1-eta)|0><0|`` the quadrature variance is ``1/2 + eta``.
    Returns ``(eta, bootstrap stderr)``.
    """
    x = np.asarray(samples.x, dtype=float)
    if alpha_abs > 0:
        if samples.theta is None:
            raise PhaseIndeterminateError("de-displacement needs assigned phases")
        x = x - math.sqrt(2.0) * alpha_abs * np.cos(samples.theta - alpha_phase)
    eta = float(np.var(x)) - 0.5
    moments = bootstrap_means(np.column_stack([x, x * x]), bootstrap_reps, seed, workers)
    boot = moments[:, 1] - moments[:, 0] ** 2 - 0.5
    return eta, float(np.std(boot, ddof=1))


def fit_report(samples: CalibratedSamples, bootstrap_reps: int = 200, seed: int = 0, workers: int = 1) -> FitReport:
    """Fit ``|alpha|``, its phase and ``eta``; phase-averaged data get ``alpha = 0``."""
    try:
        af = fit_alpha(samples)
        indeterminate = False
    except PhaseIndeterminateError:
        af = AlphaFit(0.0, 0.0, 0.0, 0.0)
        indeterminate = True
    eta, se_eta = fit_eta(samples, af.alpha_abs, af.alpha_phase, bootstrap_reps, seed, workers)
    return FitReport(af.alpha_abs, af.alpha_phase, eta, af.stderr_abs, af.stderr_phase, se_eta, indeterminate)


def negativity_report(
    grid: WignerGrid,
    samples: CalibratedSamples,
    bootstrap_reps: int = 200,
    seed: int = 0,
    centre: tuple[float, float] | None = None,
    radius: float | None = None,
    workers: int = 1,
) -> NegativityReport:
    """Grid minimum of a back-projected Wigner function and its bootstrap z-score.

    With ``centre`` and ``radius`` the search is limited to grid nodes within
    ``radius`` of ``centre``; over a whole grid the smallest of many noisy
    near-zero tail values is itself a few standard errors below zero.
    """
    values = grid.values
    if centre is not None:
        X, P = grid.mesh()
        inside = np.hypot(X - centre[0], P - centre[1]) <= (radius if radius is not None else NEGATIVITY_RADIUS)
        if not inside.any():
            raise ConfigError("negativity search region contains no grid node")
        values = np.where(inside, values, np.inf)
    j, i = np.unravel_index(int(np.argmin(values)), values.shape)
    x0, p0 = float(grid.x_axis.values[i]), float(grid.p_axis.values[j])
    _, se = _point_stats(samples, x0, p0, grid.kc, bootstrap_reps, seed, workers)
    wmin = float(grid.values[j, i])
    return NegativityReport(wmin, x0, p0, _z(wmin, se), se)


def _z(value: float, se: float) -> float:
    if se > 0:
        return value / se
    return -math.inf if value < 0 else (math.inf if value > 0 else 0.0)


def _point_stats(samples, x0, p0, kc, reps, seed, workers) -> tuple[float, float]:
    terms = fbp_point_values(samples, x0, p0, kc)
    return float(np.mean(terms)), float(np.std(bootstrap_means(terms, reps, seed, workers), ddof=1))


def wigner_point_report(
    samples: CalibratedSamples,
    x0: float,
    p0: float,
    kc: float,
    bootstrap_reps: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> NegativityReport:
    """Back-projected value at one phase-space point with its bootstrap z-score."""
    w, se = _point_stats(samples, float(x0), float(p0), kc, bootstrap_reps, seed, workers)
    return NegativityReport(w, float(x0), float(p0), _z(w, se), se)


def negativity_report_radial(profile: RadialProfile, samples, bootstrap_reps: int = 100, seed: int = 0) -> NegativityReport:
    """Minimum of a radial profile, with samples resampled and re-inverted at that radius."""
    x = np.asarray(getattr(samples, "x", samples), dtype=float)
    k = int(np.argmin(profile.w))
    r0, wmin = float(profile.r[k]), float(profile.w[k])
    children = np.random.SeedSequence(int(seed)).spawn(bootstrap_reps)
    boot = np.empty(bootstrap_reps)
    for b, child in enumerate(children):
        rng = np.random.Generator(np.random.Philox(child))
        boot[b] = wigner_abel_at(x[rng.integers(0, x.size, x.size)], r0, profile.bandwidth)
    se = float(np.std(boot, ddof=1))
    return NegativityReport(wmin, r0, 0.0, _z(wmin, se), se)


def _as_arrays(diagonals) -> tuple[np.ndarray, np.ndarray]:
    if len(diagonals) and isinstance(diagonals[0], DiagonalEstimate):
        order = sorted(diagonals, key=lambda d: d.n)
        return np.array([d.rho_nn for d in order]), np.array([d.stderr for d in order])
    v = np.asarray(diagonals, dtype=float)
    return v, np.zeros_like(v)


def peak_report(diagonals, threshold: float = 1.0, positivity: float = 3.0) -> PeakReport:
    """Count significant maxima of a photon-number distribution.

    A candidate is a local maximum; a run of equal values counts once, at
    its first index.  ``m = 0`` needs only to exceed its right neighbour and
    the last entry is a truncation edge that never counts.  Its prominence is
    measured against the lowest point separating it from the next higher
    value on either side, and it counts when

    * the prominence exceeds ``threshold`` combined standard errors of the
      peak and that lowest point, and
    * the peak value itself exceeds ``positivity`` standard errors.

    Accepts a list of :class:`DiagonalEstimate` or a plain probability vector
    (zero uncertainty).
    """
    v, se = _as_arrays(diagonals)
    n = v.size
    peaks = []
    for i in range(n - 1):
        if i > 0 and v[i] <= v[i - 1]:
            continue
        e = i
        while e + 1 < n and v[e + 1] == v[i]:
            e += 1
        if e == n - 1 or v[e + 1] > v[i]:
            continue
        bases = []
        if i > 0:
            j = i - 1
            while j >= 0 and v[j] <= v[i]:
                j -= 1
            seg = np.arange(j + 1, i)
            bases.append(seg[np.argmin(v[seg])])
        k = e + 1
        while k < n and v[k] <= v[i]:
            k += 1
        seg = np.arange(e + 1, k)
        bases.append(seg[np.argmin(v[seg])])
        base = max(bases, key=lambda b: v[b])
        prominence = v[i] - v[base]
        if prominence > threshold * math.hypot(se[i], se[base]) and v[i] > positivity * se[i]:
            peaks.append(i)
    dips = [a + int(np.argmin(v[a : b + 1])) for a, b in zip(peaks, peaks[1:])]
    return PeakReport(peaks, dips)


def compare_grid_to_state(grid: WignerGrid, state: StateModel) -> dict:
    X, P = grid.mesh()
    diff = grid.values - wigner_analytic(state, X, P)
    return {"max_abs": float(np.max(np.abs(diff))), "rms": float(np.sqrt(np.mean(diff**2)))}


def compare_grids(a: WignerGrid, b: WignerGrid) -> dict:
    if not a.same_axes(b):
        raise GridMismatchError("grids are defined on different axes")
    diff = a.values - b.values
    return {"max_abs": float(np.max(np.abs(diff))), "rms": float(np.sqrt(np.mean(diff**2)))}


def compare_diagonals(estimates: list[DiagonalEstimate], reference) -> dict:
    """Chi-square style distance between estimated diagonals and a reference.

    ``reference`` is a :class:`StateModel` (theory) or another estimate list.
    """
    est, se = _as_arrays(estimates)
    if isinstance(reference, StateModel):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            ref = photon_statistics(reference, est.size - 1)
        ref_se = np.zeros_like(ref)
    else:
        ref, ref_se = _as_arrays(reference)
        if ref.size != est.size:
            raise GridMismatchError(f"diagonal lists differ in length ({est.size} vs {ref.size})")
    diff = est - ref
    scale = np.hypot(se, ref_se)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(scale > 0, diff / scale, np.where(diff == 0, 0.0, np.inf))
    return {
        "chi2": float(np.sum(z**2)),
        "dof": int(est.size),
        "max_abs_z": float(np.max(np.abs(z))),
        "max_abs_diff": float(np.max(np.abs(diff))),
        "within_4_stderr": bool(np.all(np.abs(z) <= 4.0)),
    }


def phase_averaged_wigner(state: StateModel, r, n_phi: int = 128) -> np.ndarray:
    """Azimuthal average of the analytic Wigner function about the origin."""
    r = np.asarray(r, dtype=float)
    phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
    if state.is_phase_symmetric:
        return wigner_analytic(state, r, np.zeros_like(r))
    X = r[:, None] * np.cos(phi)
    P = r[:, None] * np.sin(phi)
    return wigner_analytic(state, X, P).mean(axis=1)


def compare_profile_to_state(profile: RadialProfile, state: StateModel) -> dict:
    diff = profile.w - phase_averaged_wigner(state, profile.r)
    return {"max_abs": float(np.max(np.abs(diff))), "rms": float(np.sqrt(np.mean(diff**2)))}


def compare_profiles(a: RadialProfile, b: RadialProfile) -> dict:
    if a.r.shape != b.r.shape or not np.array_equal(a.r, b.r):
        raise GridMismatchError("radial profiles are tabulated on different radii")
    diff = a.w - b.w
    return {"max_abs": float(np.max(np.abs(diff))), "rms": float(np.sqrt(np.mean(diff**2)))}
