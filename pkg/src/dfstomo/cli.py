"""Command-line pipeline: simulate, reconstruct, analyze, compare.

Every stage reads and writes plain files in one directory::

    acquisition.jsonl  vacuum.jsonl  truth.json      (simulate)
    wigner_grid.txt | radial_profile.txt
    diagonals.txt                                    (reconstruct)
    report.json                                      (analyze)
    compare.json                                     (compare)

Exit codes: 0 success, 2 configuration error, 3 IO error, 4 calibration
error, 5 phase-coverage error, 1 anything else.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis
from .errors import (
    CalibrationError,
    ConfigError,
    GridMismatchError,
    PhaseCoverageError,
    PhaseIndeterminateError,
    RecordFormatError,
    UnsupportedOrderError,
)
from .homodyne_sim import (
    DEFAULT_THETA_STEP,
    AcquisitionConfig,
    read_records,
    read_sidecar,
    run_acquisition,
    vacuum_calibration_run,
    write_records,
    write_sidecar,
)
from .states import StateModel
from .tomography import (
    DEFAULT_KC,
    PATTERN_N_MAX,
    CalibratedSamples,
    GridAxis,
    assign_phases,
    estimate_diagonals,
    reconstruct_wigner_abel,
    reconstruct_wigner_fbp,
    scale_to_vacuum,
)
from .tomography import io as tio

log = logging.getLogger("dfstomo")

EXIT_OK, EXIT_OTHER, EXIT_CONFIG, EXIT_IO, EXIT_CALIBRATION, EXIT_COVERAGE = 0, 1, 2, 3, 4, 5

ACQUISITION = "acquisition.jsonl"
VACUUM = "vacuum.jsonl"
TRUTH = "truth.json"
GRID = "wigner_grid.txt"
PROFILE = "radial_profile.txt"
DIAGONALS = "diagonals.txt"
REPORT = "report.json"
COMPARE = "compare.json"


@dataclass
class RunConfig:
    """Everything a pipeline run depends on.

    Values come from defaults, then an optional flat ``key = value`` file,
    then command-line flags.
    """

    scenario: str | None = None
    state: str | None = None
    n_samples: int = 200_000
    n_vacuum: int | None = None
    seed: int = 0
    theta_start: float = 0.0
    theta_step: float | None = None
    effective_eta: float | None = None
    raw_scale: float = 1.0
    electronic_noise: float = 0.0
    kc: float = DEFAULT_KC
    grid: str = "-4:4:0.125"
    r_max: float = 4.0
    r_step: float = 0.05
    n_max: int = PATTERN_N_MAX
    bootstrap_reps: int = 200
    out: str = "."
    threads: int = 1

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name for f in dataclasses.fields(cls)]

    def update(self, values: dict) -> None:
        types = {f.name: f.type for f in dataclasses.fields(self)}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError(f"unknown configuration key {key!r}")
            setattr(self, key, _coerce(key, raw, types[key]))

    @classmethod
    def from_file(cls, path) -> dict:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from None
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            values[key.strip().replace("-", "_")] = value.strip()
        return values

    def acquisition(self) -> AcquisitionConfig:
        if self.scenario and self.state:
            raise ConfigError("give either a scenario or an explicit state, not both")
        if self.scenario:
            if self.scenario not in analysis.SCENARIOS:
                raise ConfigError(f"unknown scenario {self.scenario!r}; known: {', '.join(analysis.SCENARIOS)}")
            sc = analysis.SCENARIOS[self.scenario]
            state, theta_step, eff = sc.state, sc.theta_step, sc.effective_eta
        elif self.state:
            state, theta_step, eff = StateModel.from_text(self.state), None, None
        else:
            raise ConfigError("no state: pass --scenario or --state")
        if self.theta_step is not None:
            theta_step = self.theta_step
        if self.effective_eta is not None:
            eff = self.effective_eta
        return AcquisitionConfig(
            state=state,
            n_samples=self.n_samples,
            theta_start=self.theta_start,
            theta_step=DEFAULT_THETA_STEP if theta_step is None else theta_step,
            raw_scale=self.raw_scale,
            electronic_noise=self.electronic_noise,
            seed=self.seed,
            effective_eta=eff,
            n_vacuum=self.n_vacuum,
        )

    def validate(self) -> None:
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if self.bootstrap_reps < 2:
            raise ConfigError("bootstrap_reps must be >= 2")
        if not 0 <= self.n_max <= PATTERN_N_MAX:
            raise UnsupportedOrderError(f"n_max must lie in 0..{PATTERN_N_MAX}")
        if not (math.isfinite(self.kc) and self.kc > 0):
            raise ConfigError("kc must be positive")
        if not (self.r_step > 0 and self.r_max > 0):
            raise ConfigError("r_max and r_step must be positive")
        GridAxis.parse(self.grid)


def _coerce(key: str, raw, typ: str):
    if raw is None or not isinstance(raw, str):
        return raw
    base = typ.replace(" | None", "")
    if "None" in typ and raw.lower() in ("", "none"):
        return None
    try:
        if base == "int":
            return int(float(raw)) if float(raw).is_integer() else int(raw)
        if base == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as {base}") from None
    return raw


# ---------------------------------------------------------------- helpers


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n", encoding="utf-8")


def _load_samples(directory: Path) -> tuple[CalibratedSamples, bool]:
    """Scaled samples with phases if a phase ramp can be found; flag tells whether it could."""
    acq = directory / ACQUISITION
    vac = directory / VACUUM
    if not acq.exists():
        raise FileNotFoundError(f"record file {acq} not found")
    if not vac.exists():
        raise CalibrationError(f"vacuum calibration file {vac} not found")
    scaled = scale_to_vacuum(read_records(acq), read_records(vac))
    try:
        return assign_phases(scaled), True
    except PhaseIndeterminateError as exc:
        log.info("phase indeterminate (%s); treating data as phase-averaged", exc)
        return CalibratedSamples(scaled), False


def _reference_state(cfg: RunConfig, directory: Path) -> StateModel:
    """State to compare against: explicit flags first, then the truth sidecar."""
    if cfg.scenario or cfg.state:
        return cfg.acquisition().effective_state
    truth = directory / TRUTH
    if not truth.exists():
        raise ConfigError("no reference: pass --state/--scenario or keep truth.json next to the records")
    return StateModel.from_text(read_sidecar(truth).state)


def _phase_aligned(state: StateModel) -> StateModel:
    # reconstructions put the displacement on the positive X axis
    a = abs(state.alpha)
    return dataclasses.replace(state, alpha=complex(a, 0.0))


# ---------------------------------------------------------------- stages


def cmd_simulate(cfg: RunConfig) -> dict:
    acq_cfg = cfg.acquisition()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    run, sidecar = run_acquisition(acq_cfg, workers=cfg.threads)
    vac = vacuum_calibration_run(acq_cfg, workers=cfg.threads)
    if cfg.scenario:
        sidecar.extra["scenario"] = cfg.scenario
    write_records(out / ACQUISITION, run, "acquisition")
    write_records(out / VACUUM, vac, "vacuum")
    write_sidecar(out / TRUTH, sidecar)
    print(f"acquisition records: {len(run)}")
    print(f"vacuum records: {len(vac)}")
    return {"acquisition": len(run), "vacuum": len(vac)}


def cmd_reconstruct(cfg: RunConfig, directory: Path | None = None) -> str:
    cfg.validate()
    directory = Path(directory or cfg.out)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    samples, phased = _load_samples(directory)
    label = ""
    if (directory / TRUTH).exists():
        label = read_sidecar(directory / TRUTH).state
    for stale in (GRID, PROFILE):
        (out / stale).unlink(missing_ok=True)
    if phased:
        axis = GridAxis.parse(cfg.grid)
        grid = reconstruct_wigner_fbp(samples, axis, axis, kc=cfg.kc, workers=cfg.threads, label=label)
        tio.write_grid(out / GRID, grid)
        kind = "grid"
    else:
        profile = reconstruct_wigner_abel(samples, r_max=cfg.r_max, r_step=cfg.r_step)
        tio.write_profile(out / PROFILE, profile)
        kind = "profile"
    diag = estimate_diagonals(samples, cfg.n_max, cfg.bootstrap_reps, cfg.seed, cfg.threads)
    tio.write_diagonals(out / DIAGONALS, diag, len(samples), cfg.bootstrap_reps)
    print(f"reconstruction: {kind}; diagonals n=0..{cfg.n_max}")
    return kind


def cmd_analyze(cfg: RunConfig, directory: Path | None = None) -> dict:
    cfg.validate()
    directory = Path(directory or cfg.out)
    samples, phased = _load_samples(directory)
    fit = analysis.fit_report(samples, cfg.bootstrap_reps, cfg.seed, cfg.threads)
    doc = {"n_samples": len(samples), "fit": fit.to_dict()}

    if (directory / GRID).exists():
        if not phased:
            raise PhaseCoverageError("grid present but the records carry no phase ramp")
        grid = tio.read_grid(directory / GRID)
        cx = math.sqrt(2.0) * fit.alpha_abs
        neg = analysis.negativity_report(
            grid, samples, cfg.bootstrap_reps, cfg.seed, centre=(cx, 0.0),
            radius=analysis.NEGATIVITY_RADIUS, workers=cfg.threads,
        )
        centre = analysis.wigner_point_report(samples, cx, 0.0, grid.kc, cfg.bootstrap_reps, cfg.seed, cfg.threads)
        doc["reconstruction"] = "grid"
        doc["centre"] = {"x": centre.loc_x, "p": centre.loc_p, "w": centre.min_value,
                         "stderr": centre.stderr, "z": centre.z_score}
    elif (directory / PROFILE).exists():
        profile = tio.read_profile(directory / PROFILE)
        neg = analysis.negativity_report_radial(profile, samples, min(cfg.bootstrap_reps, 100), cfg.seed)
        doc["reconstruction"] = "profile"
        doc["centre"] = {"x": 0.0, "p": 0.0, "w": float(profile.w[0])}
    else:
        raise FileNotFoundError(f"no {GRID} or {PROFILE} in {directory}; run reconstruct first")
    doc["negativity"] = {**neg.to_dict(), "significant": neg.significant()}

    diag_path = directory / DIAGONALS
    if not diag_path.exists():
        raise FileNotFoundError(f"{diag_path} not found; run reconstruct first")
    diag = tio.read_diagonals(diag_path)
    doc["photon_numbers"] = analysis.peak_report(diag).to_dict()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / REPORT, doc)
    print(
        f"|alpha| = {fit.alpha_abs:.4f}, eta = {fit.eta:.4f}, min W = {neg.min_value:.4f} "
        f"(z = {neg.z_score:.2f}), peaks = {doc['photon_numbers']['peaks']}"
    )
    return doc


def cmd_compare(cfg: RunConfig, directory: Path | None = None, against: Path | None = None) -> dict:
    directory = Path(directory or cfg.out)
    doc: dict = {}
    grid_p, prof_p, diag_p = directory / GRID, directory / PROFILE, directory / DIAGONALS
    if not (grid_p.exists() or prof_p.exists() or diag_p.exists()):
        raise FileNotFoundError(f"no reconstruction files in {directory}")
    if against is not None:
        against = Path(against)
        doc["against"] = str(against)
        if grid_p.exists():
            doc["wigner"] = analysis.compare_grids(tio.read_grid(grid_p), tio.read_grid(against / GRID))
        elif prof_p.exists():
            doc["wigner"] = analysis.compare_profiles(tio.read_profile(prof_p), tio.read_profile(against / PROFILE))
        if diag_p.exists():
            doc["diagonals"] = analysis.compare_diagonals(tio.read_diagonals(diag_p), tio.read_diagonals(against / DIAGONALS))
    else:
        state = _reference_state(cfg, directory)
        doc["reference_state"] = state.to_text()
        aligned = _phase_aligned(state)
        if grid_p.exists():
            doc["wigner"] = analysis.compare_grid_to_state(tio.read_grid(grid_p), aligned)
        elif prof_p.exists():
            doc["wigner"] = analysis.compare_profile_to_state(tio.read_profile(prof_p), state)
        if diag_p.exists():
            doc["diagonals"] = analysis.compare_diagonals(tio.read_diagonals(diag_p), state)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_json(out / COMPARE, doc)
    for key in ("wigner", "diagonals"):
        if key in doc:
            print(f"{key}: " + ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in doc[key].items()))
    return doc


# ---------------------------------------------------------------- argparse


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'key = value' file; flags override it")
    common.add_argument("--scenario", choices=sorted(analysis.SCENARIOS), help="named preset")
    common.add_argument("--state", help="state text, e.g. 'displaced_mix alpha=0.60+0.00i eta=0.62'")
    common.add_argument("--n-samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--kc", type=float, help=f"FBP cutoff frequency (default {DEFAULT_KC})")
    common.add_argument("--grid", help="'min:max:step' for both grid axes (default -4:4:0.125)")
    common.add_argument("--n-max", type=int, help="largest photon number estimated")
    common.add_argument("--bootstrap-reps", type=int)
    common.add_argument("--out", help="output directory (default: current)")
    common.add_argument("--threads", type=int, help="worker cap (default 1)")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="dfstomo", description="Homodyne tomography of displaced Fock states.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="simulate acquisition and vacuum records")
    for name, text in (("reconstruct", "Wigner function and photon-number diagonals"),
                       ("analyze", "fit alpha/eta, negativity and peak report")):
        sp = sub.add_parser(name, parents=[common], help=text)
        sp.add_argument("--in", dest="indir", help="directory with record files (default: --out)")
    sp = sub.add_parser("compare", parents=[common], help="error metrics against a state model or another run")
    sp.add_argument("--in", dest="indir", help="directory with reconstruction files (default: --out)")
    sp.add_argument("--against", help="second run directory to compare with")
    sub.add_parser("run", parents=[common], help="simulate, reconstruct, analyze and compare in one go")
    return p


_FLAG_KEYS = ("scenario", "state", "n_samples", "seed", "kc", "grid", "n_max", "bootstrap_reps", "out", "threads")


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        cfg.update(RunConfig.from_file(args.config))
    cfg.update({k: getattr(args, k) for k in _FLAG_KEYS if getattr(args, k) is not None})
    return cfg


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # grid specs start with '-', which argparse would take for an option
    for i in range(len(argv) - 1):
        if argv[i] == "--grid":
            argv[i : i + 2] = [f"--grid={argv[i + 1]}", ""]
    argv = [a for a in argv if a != ""]
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = build_config(args)
        indir = getattr(args, "indir", None)
        if args.command == "simulate":
            cmd_simulate(cfg)
        elif args.command == "reconstruct":
            cmd_reconstruct(cfg, indir)
        elif args.command == "analyze":
            cmd_analyze(cfg, indir)
        elif args.command == "compare":
            cmd_compare(cfg, indir, args.against)
        else:
            cmd_simulate(cfg)
            cmd_reconstruct(cfg)
            cmd_analyze(cfg)
            cmd_compare(cfg)
    except (ConfigError, UnsupportedOrderError, GridMismatchError) as exc:
        return _fail(EXIT_CONFIG, "configuration error", exc)
    except CalibrationError as exc:
        return _fail(EXIT_CALIBRATION, "calibration error", exc)
    except PhaseCoverageError as exc:
        return _fail(EXIT_COVERAGE, "phase coverage error", exc)
    except (OSError, RecordFormatError) as exc:
        return _fail(EXIT_IO, "IO error", exc)
    except ValueError as exc:
        return _fail(EXIT_CONFIG, "invalid value", exc)
    except Exception as exc:  # noqa: BLE001
        return _fail(EXIT_OTHER, "error", exc)
    return EXIT_OK


def _fail(code: int, what: str, exc: Exception) -> int:
    print(f"dfstomo: {what}: {exc}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
