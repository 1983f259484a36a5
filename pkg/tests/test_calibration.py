import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dfstomo.errors import CalibrationError, PhaseCoverageError, PhaseIndeterminateError
from dfstomo.states import StateModel
from dfstomo.tomography import assign_phases, check_phase_coverage, fit_phase_ramp, scale_to_vacuum

from conftest import simulate


def _circ_rms(a, b):
    d = np.angle(np.exp(1j * (np.asarray(a) - np.asarray(b))))
    return float(np.sqrt(np.mean(d**2)))


def test_vacuum_self_calibration():
    _, _, vac, _ = simulate(StateModel.vacuum(), 10, raw_scale=3.7, n_vacuum=100_000)
    y = scale_to_vacuum(vac, vac)
    assert abs(y.var(ddof=1) - 0.5) < 1e-12


@settings(max_examples=25, deadline=None)
@given(st.floats(1e-3, 1e3))
def test_scale_invariance(c):
    rng = np.random.default_rng(0)
    raw = rng.normal(size=2000)
    vac = rng.normal(size=1500)
    np.testing.assert_allclose(scale_to_vacuum(c * raw, c * vac), scale_to_vacuum(raw, vac), rtol=1e-12)


def test_too_few_vacuum_records():
    with pytest.raises(CalibrationError):
        scale_to_vacuum(np.ones(10), np.random.default_rng(0).normal(size=999))
    with pytest.raises(CalibrationError):
        scale_to_vacuum(np.ones(10), np.zeros(5000))


def test_coherent_amplitude_after_scaling():
    _, run, vac, _ = simulate(StateModel.coherent(0.60), 200_000, raw_scale=0.37, electronic_noise=0.0)
    ramp = fit_phase_ramp(scale_to_vacuum(run, vac))
    assert ramp.amplitude == pytest.approx(math.sqrt(2) * 0.60, abs=0.02)
    assert ramp.omega == pytest.approx(2 * math.pi / 4000, rel=1e-3)


@pytest.mark.parametrize("phase", [0.0, 1.0, -2.5])
def test_phase_recovery_against_truth(phase):
    alpha = 0.60 * complex(math.cos(phase), math.sin(phase))
    _, run, vac, truth = simulate(StateModel.displaced_mix(alpha, 0.62), 50_000, seed=3)
    s = assign_phases(scale_to_vacuum(run, vac))
    # phase origin is the displacement direction
    assert _circ_rms(s.theta, truth.theta - phase) < 0.05


def test_noiseless_sinusoid_exact():
    m = np.arange(64_000)
    omega, phi = 2 * math.pi / 3217.0, 0.7
    x = 0.9 * np.cos(omega * m + phi)
    ramp = fit_phase_ramp(x)
    assert ramp.omega == pytest.approx(omega, abs=1e-9)
    assert math.remainder(ramp.phi0 - phi, 2 * math.pi) == pytest.approx(0.0, abs=1e-9)


def test_period_hint_and_negative_slope():
    m = np.arange(40_000)
    x = np.cos(-2 * math.pi * m / 2000.0) + np.random.default_rng(1).normal(0, 0.7, m.size)
    ramp = fit_phase_ramp(x, expected_period_hint=2000)
    assert ramp.omega > 0
    assert ramp.window == 40


@pytest.mark.parametrize("seed", range(5))
def test_vacuum_is_phase_indeterminate(seed):
    _, run, vac, _ = simulate(StateModel.vacuum(), 200_000, seed=seed)
    with pytest.raises(PhaseIndeterminateError):
        assign_phases(scale_to_vacuum(run, vac))


def test_undisplaced_mixture_is_phase_indeterminate():
    _, run, vac, _ = simulate(StateModel.displaced_mix(0.0, 0.62), 200_000, seed=2)
    with pytest.raises(PhaseIndeterminateError):
        assign_phases(scale_to_vacuum(run, vac))


def test_short_record_indeterminate():
    with pytest.raises(PhaseIndeterminateError):
        fit_phase_ramp(np.ones(50))


def test_phase_coverage():
    check_phase_coverage(np.linspace(0, math.pi, 100))
    with pytest.raises(PhaseCoverageError):
        check_phase_coverage(np.full(100, 0.3))
    with pytest.raises(PhaseCoverageError):
        check_phase_coverage(None)
