import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from dfstomo.errors import ConfigError, RecordFormatError
from dfstomo.homodyne_sim import (
    BLOCK,
    AcquisitionConfig,
    read_records,
    read_sidecar,
    run_acquisition,
    sample_quadrature,
    vacuum_calibration_run,
    write_records,
    write_sidecar,
)
from dfstomo.states import StateModel, marginal_pdf
from dfstomo.tomography import windowed_means

N = 100_000


def test_vacuum_moments():
    x = sample_quadrature(StateModel.vacuum(), np.zeros(N), np.random.default_rng(1))
    assert abs(x.mean()) < 4 * math.sqrt(0.5 / N)
    # var of sample variance for a Gaussian: 2 sigma^4 / N
    assert abs(x.var() - 0.5) < 4 * math.sqrt(2 * 0.25 / N)


def test_displaced_fock_mean_at_alpha_phase():
    state = StateModel.displaced_fock(0.60, 1)
    x = sample_quadrature(state, np.zeros(N), np.random.default_rng(2))
    # the |1> marginal has variance 3/2
    assert abs(x.mean() - math.sqrt(2) * 0.60) < 4 * math.sqrt(1.5 / N)


@pytest.mark.parametrize(
    "state,theta",
    [
        (StateModel.fock(1), 0.0),
        (StateModel.displaced_mix(0.6, 0.62), 0.9),
        (StateModel.coherent(1.3 - 0.4j), 2.0),
        (StateModel.displaced_fock(2.4j, 1), 1.1),
    ],
)
def test_sampler_matches_marginal(state, theta):
    x = sample_quadrature(state, np.full(40_000, theta), np.random.default_rng(3))
    grid = np.linspace(-12, 12, 20001)
    cdf = np.cumsum(marginal_pdf(state, theta, grid)) * (grid[1] - grid[0])
    res = stats.kstest(x, lambda v: np.interp(v, grid, cdf))
    assert res.pvalue > 1e-3


def test_branch_frequencies():
    state = StateModel.displaced_mix(0.6, 0.62)
    _, branch = sample_quadrature(state, np.zeros(N), np.random.default_rng(4), return_branch=True)
    p = (branch == 0).mean()
    assert abs(p - 0.62) < 4 * math.sqrt(0.62 * 0.38 / N)


def test_record_count_and_indices(tmp_path):
    cfg = AcquisitionConfig(StateModel.coherent(0.6), 1000, seed=3)
    run, truth = run_acquisition(cfg)
    recs = list(run.records())
    assert len(recs) == 1000 and [r.m for r in recs] == list(range(1000))
    assert truth.theta.shape == (1000,)


def test_determinism_and_worker_independence():
    cfg = AcquisitionConfig(StateModel.displaced_mix(0.6, 0.62), 3 * BLOCK + 17, seed=42)
    a, _ = run_acquisition(cfg, workers=1)
    b, _ = run_acquisition(cfg, workers=3)
    c, _ = run_acquisition(cfg, workers=1)
    assert a.x_raw.tobytes() == b.x_raw.tobytes() == c.x_raw.tobytes()
    other, _ = run_acquisition(AcquisitionConfig(cfg.state, cfg.n_samples, seed=43))
    assert not np.array_equal(a.x_raw, other.x_raw)


def test_coherent_sinusoid_amplitude():
    # theta sweeps [0, 4 pi)
    n = 200_000
    cfg = AcquisitionConfig(StateModel.coherent(0.60), n, theta_step=4 * math.pi / n, raw_scale=2.5, seed=1)
    run, truth = run_acquisition(cfg)
    y, centres = windowed_means(run.x_raw, 400)
    th, _ = windowed_means(truth.theta, 400)
    A = np.column_stack([np.cos(th), np.sin(th)])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    assert math.hypot(*coef) == pytest.approx(math.sqrt(2) * 0.60 * 2.5, rel=0.02)


@pytest.mark.parametrize("scale,noise", [(1.0, 0.0), (3.0, 0.2)])
def test_vacuum_run_variance(scale, noise):
    cfg = AcquisitionConfig(StateModel.coherent(0.6), N, raw_scale=scale, electronic_noise=noise, seed=7)
    vac = vacuum_calibration_run(cfg)
    target = scale**2 * (0.5 + noise**2)
    assert abs(vac.x_raw.var() / target - 1) < 4 * math.sqrt(2 / N)
    again = vacuum_calibration_run(cfg)
    assert again.x_raw.tobytes() == vac.x_raw.tobytes()


def test_vacuum_stream_independent_of_signal():
    cfg = AcquisitionConfig(StateModel.vacuum(), 5000, seed=1)
    run, _ = run_acquisition(cfg)
    vac = vacuum_calibration_run(cfg)
    assert not np.array_equal(run.x_raw, vac.x_raw)
    assert len(vacuum_calibration_run(AcquisitionConfig(StateModel.vacuum(), 5000, n_vacuum=2000))) == 2000


def test_effective_eta_override():
    cfg = AcquisitionConfig(StateModel.displaced_mix(1.3, 0.62), 10, effective_eta=0.60)
    assert cfg.effective_state == StateModel.displaced_mix(1.3, 0.60)
    with pytest.raises(ConfigError):
        AcquisitionConfig(StateModel.coherent(1.3), 10, effective_eta=0.6)


@pytest.mark.parametrize(
    "kw",
    [
        {"n_samples": 0},
        {"n_samples": 2.5},
        {"raw_scale": 0.0},
        {"electronic_noise": -1.0},
        {"theta_step": math.inf},
        {"seed": -1},
    ],
)
def test_config_validation(kw):
    args = {"state": StateModel.vacuum(), "n_samples": 10, **kw}
    with pytest.raises(ConfigError):
        AcquisitionConfig(**args)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 300), st.integers(0, 2**32), st.floats(-1e3, 1e3), st.floats(0.01, 10))
def test_records_round_trip(tmp_path_factory, n, seed, start, scale):
    path = tmp_path_factory.mktemp("rec") / "a.jsonl"
    cfg = AcquisitionConfig(StateModel.displaced_mix(0.6, 0.62), n, theta_start=start, raw_scale=scale, seed=seed)
    run, truth = run_acquisition(cfg)
    write_records(path, run)
    back = read_records(path)
    assert back.x_raw.tobytes() == run.x_raw.tobytes()
    write_sidecar(path.with_suffix(".json"), truth)
    t2 = read_sidecar(path.with_suffix(".json"))
    assert t2.theta.tobytes() == truth.theta.tobytes()
    assert AcquisitionConfig.from_dict(t2.config) == cfg


def test_sidecar_echoes_eta(tmp_path):
    cfg = AcquisitionConfig(StateModel.displaced_mix(0.6, 0.62), 100)
    _, truth = run_acquisition(cfg)
    write_sidecar(tmp_path / "t.json", truth)
    doc = json.loads((tmp_path / "t.json").read_text())
    assert doc["eta"] == 0.62 and doc["alpha"] == [0.6, 0.0]


@pytest.mark.parametrize(
    "text",
    [
        "",
        "not json\n",
        '{"format": "other", "version": 1, "count": 0}\n',
        '{"format": "dfstomo-quadratures", "version": 1, "kind": "acquisition", "count": 2}\n{"m": 0, "x_raw": 1.0}\n',
        '{"format": "dfstomo-quadratures", "version": 1, "kind": "acquisition", "count": 1}\n{"m": 3, "x_raw": 1.0}\n',
        '{"format": "dfstomo-quadratures", "version": 1, "kind": "acquisition", "count": 1}\n{"x": 1.0}\n',
    ],
)
def test_bad_record_files(tmp_path, text):
    p = tmp_path / "bad.jsonl"
    p.write_text(text)
    with pytest.raises(RecordFormatError):
        read_records(p)
