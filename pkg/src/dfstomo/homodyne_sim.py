"""Synthetic balanced-homodyne acquisition runs.

A run is an ordered list of raw detector readings ``x_raw[m]`` taken while the
local-oscillator phase is swept linearly (or, for ``theta_step == 0``, left
free-running, modelled as an independent uniform phase per sample).  The true
phases are written only to the truth sidecar.

Random numbers come from one seeded Philox stream per run, split into fixed
blocks of ``BLOCK`` samples; every block gets its own child stream, so a run is
bit-identical whatever the number of workers generating it.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ConfigError, RecordFormatError
from .states import StateModel, mean_quadrature

BLOCK = 1 << 16
DEFAULT_THETA_STEP = 2.0 * math.pi / 4000.0
RECORD_FORMAT = "dfstomo-quadratures"
RECORD_VERSION = 1

_STREAM_SIGNAL = 0
_STREAM_VACUUM = 1


@dataclass(frozen=True)
class AcquisitionConfig:
    state: StateModel
    n_samples: int
    theta_start: float = 0.0
    theta_step: float = DEFAULT_THETA_STEP
    raw_scale: float = 1.0
    electronic_noise: float = 0.0
    seed: int = 0
    # replaces eta of a displaced_mix state, for matching a reduced effective efficiency
    effective_eta: float | None = None
    n_vacuum: int | None = None

    def __post_init__(self):
        if not isinstance(self.state, StateModel):
            raise ConfigError("state must be a StateModel")
        if int(self.n_samples) != self.n_samples or self.n_samples < 1:
            raise ConfigError(f"n_samples must be a positive integer, got {self.n_samples!r}")
        if self.n_vacuum is not None and (int(self.n_vacuum) != self.n_vacuum or self.n_vacuum < 1):
            raise ConfigError(f"n_vacuum must be a positive integer, got {self.n_vacuum!r}")
        for name in ("theta_start", "theta_step", "raw_scale", "electronic_noise"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.raw_scale <= 0:
            raise ConfigError(f"raw_scale must be positive, got {self.raw_scale}")
        if self.electronic_noise < 0:
            raise ConfigError(f"electronic_noise must be >= 0, got {self.electronic_noise}")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.effective_eta is not None:
            self.state.with_eta(self.effective_eta)  # validates

    @property
    def effective_state(self) -> StateModel:
        if self.effective_eta is None:
            return self.state
        return self.state.with_eta(self.effective_eta)

    def to_dict(self) -> dict:
        return {
            "state": self.state.to_text(),
            "n_samples": int(self.n_samples),
            "theta_start": float(self.theta_start),
            "theta_step": float(self.theta_step),
            "raw_scale": float(self.raw_scale),
            "electronic_noise": float(self.electronic_noise),
            "seed": int(self.seed),
            "effective_eta": None if self.effective_eta is None else float(self.effective_eta),
            "n_vacuum": None if self.n_vacuum is None else int(self.n_vacuum),
        }

    @classmethod
    def from_dict(cls, d: dict) -> AcquisitionConfig:
        d = dict(d)
        d["state"] = StateModel.from_text(d["state"])
        return cls(**d)


@dataclass(frozen=True)
class SampleRecord:
    m: int
    raw_value: float


@dataclass
class AcquisitionRun:
    """Ordered raw quadrature readings; the record index ``m`` is the array position."""

    x_raw: np.ndarray

    def __len__(self):
        return self.x_raw.size

    def records(self) -> Iterator[SampleRecord]:
        for m, v in enumerate(self.x_raw.tolist()):
            yield SampleRecord(m, v)


@dataclass
class TruthSidecar:
    config: dict
    theta: np.ndarray
    state: str
    alpha: complex
    eta: float | None
    extra: dict = field(default_factory=dict)


def sample_quadrature(state: StateModel, theta, rng: np.random.Generator, return_branch: bool = False):
    """Draw homodyne outcomes, one per entry of ``theta``.

    Gaussian components are drawn directly; the single-photon component uses
    ``sign * sqrt(g)`` with ``g ~ Gamma(3/2, 1)``, whose density is proportional
    to ``x**2 exp(-x**2)``.  The mixture component is chosen by one uniform draw.

    With ``return_branch`` the index into ``state.components()`` chosen for each
    sample is returned as well.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    size = theta.shape
    comps = state.components()
    u = rng.random(size)
    g = rng.gamma(1.5, 1.0, size)
    sign = np.where(rng.random(size) < 0.5, -1.0, 1.0)
    z = rng.normal(0.0, math.sqrt(0.5), size)

    cum = np.cumsum([w for w, _, _ in comps])
    branch = np.searchsorted(cum, u * cum[-1], side="right")
    branch = np.minimum(branch, len(comps) - 1)
    x = np.empty(size)
    for i, (_, alpha, n) in enumerate(comps):
        sel = branch == i
        base = z[sel] if n == 0 else sign[sel] * np.sqrt(g[sel])
        x[sel] = base + mean_quadrature(alpha, theta[sel])
    if return_branch:
        return x, branch
    return x


def _block_seeds(seed: int, stream: int, n: int) -> list[np.random.SeedSequence]:
    root = np.random.SeedSequence(entropy=int(seed), spawn_key=(stream,))
    return root.spawn(-(-n // BLOCK))


def _generate(config: AcquisitionConfig, state: StateModel, n: int, stream: int, workers: int):
    seeds = _block_seeds(config.seed, stream, n)
    x_raw = np.empty(n)
    theta = np.empty(n)

    def work(b):
        lo, hi = b * BLOCK, min(n, (b + 1) * BLOCK)
        rng = np.random.Generator(np.random.Philox(seeds[b]))
        if config.theta_step == 0.0:
            th = rng.uniform(0.0, 2.0 * math.pi, hi - lo)
        else:
            th = config.theta_start + np.arange(lo, hi) * config.theta_step
        x = sample_quadrature(state, th, rng)
        if config.electronic_noise > 0:
            x = x + rng.normal(0.0, config.electronic_noise, hi - lo)
        x_raw[lo:hi] = config.raw_scale * x
        theta[lo:hi] = th

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(work, range(len(seeds))))
    else:
        for b in range(len(seeds)):
            work(b)
    return x_raw, theta


def run_acquisition(config: AcquisitionConfig, workers: int = 1) -> tuple[AcquisitionRun, TruthSidecar]:
    """Simulate one phase-swept (or free-running) acquisition run.

    Returns the raw records and the truth sidecar holding the true phases.
    The output depends only on ``config``; ``workers`` changes speed, not bits.
    """
    state = config.effective_state
    x_raw, theta = _generate(config, state, int(config.n_samples), _STREAM_SIGNAL, workers)
    sidecar = TruthSidecar(
        config=config.to_dict(),
        theta=theta,
        state=state.to_text(),
        alpha=state.alpha,
        eta=state.eta if state.kind == "displaced_mix" else None,
    )
    return AcquisitionRun(x_raw), sidecar


def vacuum_calibration_run(config: AcquisitionConfig, workers: int = 1) -> AcquisitionRun:
    """Companion vacuum run at the same detector settings (independent random stream)."""
    n = int(config.n_vacuum or config.n_samples)
    x_raw, _ = _generate(config, StateModel.vacuum(), n, _STREAM_VACUUM, workers)
    return AcquisitionRun(x_raw)


def write_records(path, run: AcquisitionRun, kind: str = "acquisition") -> None:
    """JSON-Lines: a header object, then one ``{"m": .., "x_raw": ..}`` object per record."""
    header = json.dumps({"format": RECORD_FORMAT, "version": RECORD_VERSION, "kind": kind, "count": len(run)})
    body = "".join(f'{{"m": {m}, "x_raw": {v!r}}}\n' for m, v in enumerate(run.x_raw.tolist()))
    Path(path).write_text(header + "\n" + body)


def read_records(path) -> AcquisitionRun:
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise RecordFormatError(f"{path}: empty record file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise RecordFormatError(f"{path}: bad header: {exc}") from None
    if header.get("format") != RECORD_FORMAT or header.get("version") != RECORD_VERSION:
        raise RecordFormatError(f"{path}: unsupported format {header.get('format')!r} v{header.get('version')!r}")
    count = header.get("count")
    if count != len(lines) - 1:
        raise RecordFormatError(f"{path}: header announces {count} records, file holds {len(lines) - 1}")
    x = np.empty(count)
    for i, line in enumerate(lines[1:]):
        try:
            rec = json.loads(line)
            m, v = rec["m"], rec["x_raw"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise RecordFormatError(f"{path}: bad record on line {i + 2}: {exc}") from None
        if m != i:
            raise RecordFormatError(f"{path}: record indices not contiguous at line {i + 2}")
        x[i] = v
    return AcquisitionRun(x)


def write_sidecar(path, sidecar: TruthSidecar) -> None:
    doc = {
        "config": sidecar.config,
        "state": sidecar.state,
        "alpha": [sidecar.alpha.real, sidecar.alpha.imag],
        "eta": sidecar.eta,
        "theta": sidecar.theta.tolist(),
        **sidecar.extra,
    }
    Path(path).write_text(json.dumps(doc) + "\n")


def read_sidecar(path) -> TruthSidecar:
    try:
        doc = json.loads(Path(path).read_text())
        known = {"config", "state", "alpha", "eta", "theta"}
        return TruthSidecar(
            config=doc["config"],
            theta=np.asarray(doc["theta"], dtype=float),
            state=doc["state"],
            alpha=complex(*doc["alpha"]),
            eta=doc["eta"],
            extra={k: v for k, v in doc.items() if k not in known},
        )
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise RecordFormatError(f"{path}: bad sidecar: {exc}") from None
