import math

import numpy as np
import pytest

from dfstomo.homodyne_sim import AcquisitionConfig, run_acquisition, vacuum_calibration_run
from dfstomo.states import StateModel
from dfstomo.tomography import CalibratedSamples, assign_phases, scale_to_vacuum

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def simulate(state, n, seed=0, theta_step=2 * math.pi / 4000, **kw):
    cfg = AcquisitionConfig(state=state, n_samples=n, seed=seed, theta_step=theta_step, **kw)
    run, truth = run_acquisition(cfg)
    vac = vacuum_calibration_run(cfg)
    return cfg, run, vac, truth


def phased_samples(state, n, seed=0, **kw):
    """Scaled samples with fitted phases, plus the truth sidecar."""
    _, run, vac, truth = simulate(state, n, seed, **kw)
    return assign_phases(scale_to_vacuum(run, vac)), truth


def truth_samples(state, n, seed=0, **kw):
    """Scaled samples carrying the true simulated phases (for phase-free states)."""
    _, run, vac, truth = simulate(state, n, seed, **kw)
    return CalibratedSamples(scale_to_vacuum(run, vac), truth.theta), truth


@pytest.fixture(scope="session")
def fig3d_samples():
    return phased_samples(StateModel.displaced_mix(0.60, 0.62), 200_000, seed=11)


@pytest.fixture(scope="session")
def vacuum_1e6():
    return truth_samples(StateModel.vacuum(), 1_000_000, seed=5, theta_step=0.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
