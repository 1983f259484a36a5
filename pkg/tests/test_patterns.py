import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from dfstomo.errors import ExtrapolationError, PhaseCoverageError, TruncationWarning, UnsupportedOrderError
from dfstomo.states import StateModel, fock_wavefunctions, photon_statistics
from dfstomo.tomography import CalibratedSamples, estimate_diagonals, pattern_function, pattern_matrix
from dfstomo.tomography import io as tio

from conftest import phased_samples, truth_samples
from oracles import pattern_laguerre


def test_frozen_values():
    for n in range(11):
        assert pattern_function(n, 0.0) == pytest.approx(2.0 * (-1) ** n, abs=1e-8)
    assert pattern_function(0, 0.5) == pytest.approx(1.151127, abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.floats(0.0, 6.0))
def test_matches_laguerre_oracle(n, x):
    assert pattern_function(n, x) == pytest.approx(pattern_laguerre(n, x), abs=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10), st.floats(0.0, 8.0))
def test_even(n, x):
    assert pattern_function(n, -x) == pattern_function(n, x)


def test_overlap_matrix_is_identity():
    x = np.linspace(-8, 8, 32001)
    psi = fock_wavefunctions(10, x)
    F = pattern_matrix(x, 10)
    overlap = integrate.simpson(psi[:, :, None] ** 2 * F[None, :, :], x=x, axis=1)
    assert np.max(np.abs(overlap - np.eye(11))) < 1e-6


def test_order_and_range_guards():
    with pytest.raises(UnsupportedOrderError):
        pattern_function(11, 0.0)
    with pytest.raises(UnsupportedOrderError):
        pattern_function(1.5, 0.0)
    with pytest.raises(ExtrapolationError):
        pattern_function(0, 8.01)
    with pytest.raises(ExtrapolationError):
        pattern_function(0, np.nan)


def test_vacuum_diagonals():
    s, _ = truth_samples(StateModel.vacuum(), 100_000, seed=1, theta_step=0.0)
    est = estimate_diagonals(s, n_max=4, bootstrap_reps=200)
    assert abs(est[0].rho_nn - 1.0) <= 4 * est[0].stderr
    for e in est[1:]:
        assert abs(e.rho_nn) <= 4 * e.stderr


def test_mixture_diagonals():
    s, _ = truth_samples(StateModel.displaced_mix(0.0, 0.62), 100_000, seed=2, theta_step=0.0)
    est = estimate_diagonals(CalibratedSamples(s.x), n_max=3)
    assert abs(est[1].rho_nn - 0.62) <= 4 * est[1].stderr
    assert abs(est[0].rho_nn - 0.38) <= 4 * est[0].stderr


def test_displaced_diagonals_match_theory():
    state = StateModel.displaced_mix(1.3, 0.60)
    s, _ = phased_samples(state, 200_000, seed=4)
    est = estimate_diagonals(s)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        theory = photon_statistics(state, 10)
    for e, t in zip(est, theory):
        assert abs(e.rho_nn - t) <= 4 * e.stderr


def test_bootstrap_stderr_matches_clt():
    s, _ = truth_samples(StateModel.displaced_mix(0.6, 0.62), 50_000, seed=6, theta_step=0.0)
    est = estimate_diagonals(s, n_max=2, bootstrap_reps=400)
    clt = pattern_matrix(s.x, 2).std(axis=0) / math.sqrt(s.x.size)
    for e, c in zip(est, clt):
        assert e.stderr == pytest.approx(c, rel=0.15)


def test_deterministic_and_worker_free():
    s, _ = truth_samples(StateModel.displaced_mix(0.6, 0.62), 20_000, seed=7, theta_step=0.0)
    a = estimate_diagonals(s, n_max=3, bootstrap_reps=50, seed=3, workers=1)
    b = estimate_diagonals(s, n_max=3, bootstrap_reps=50, seed=3, workers=4)
    assert a == b


def test_coverage_enforced_for_phased_samples():
    x = np.zeros(1000)
    with pytest.raises(PhaseCoverageError):
        estimate_diagonals(CalibratedSamples(x, np.full(1000, 0.5)), n_max=1)


def test_diagonal_file_round_trip(tmp_path):
    s, _ = truth_samples(StateModel.vacuum(), 5000, theta_step=0.0)
    est = estimate_diagonals(s, n_max=5, bootstrap_reps=20)
    tio.write_diagonals(tmp_path / "d.txt", est, 5000, 20)
    back = tio.read_diagonals(tmp_path / "d.txt")
    assert [e.n for e in back] == list(range(6))
    np.testing.assert_allclose([e.rho_nn for e in back], [e.rho_nn for e in est], rtol=1e-5, atol=1e-12)
