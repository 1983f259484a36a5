"""Plain-text files for grids, radial profiles and diagonal estimates.

All files start with ``# key: value`` header lines; numbers in the body are
written in scientific notation with six significant digits.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import RecordFormatError
from .abel import RadialProfile
from .fbp import GridAxis, WignerGrid
from .patterns import DiagonalEstimate

CONVENTION = "vacuum-variance-1/2; alpha-plane axes (Re a, Im a) = these/sqrt2"


def _axis_line(name: str, axis: GridAxis) -> str:
    return f"# {name}: {float(axis.min)!r} {float(axis.max)!r} {float(axis.step)!r}"


def write_grid(path, grid: WignerGrid) -> None:
    lines = [
        _axis_line("X", grid.x_axis),
        _axis_line("P", grid.p_axis),
        f"# kc: {float(grid.kc)!r}",
        f"# N: {grid.n_samples}",
        f"# convention: {CONVENTION}",
    ]
    if grid.label:
        lines.append(f"# state: {grid.label}")
    body = [" ".join(f"{v:.5e}" for v in row) for row in grid.values]
    Path(path).write_text("\n".join(lines + body) + "\n", encoding="utf-8")


def _read(path) -> tuple[dict, np.ndarray]:
    header, rows = {}, []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise RecordFormatError(f"{path}: {exc}") from None
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        elif line.strip():
            rows.append([float(v) for v in line.split()])
    try:
        data = np.array(rows, dtype=float)
    except ValueError:
        raise RecordFormatError(f"{path}: ragged data rows") from None
    return header, data


def _axis(header: dict, key: str, path) -> GridAxis:
    try:
        lo, hi, step = (float(v) for v in header[key].split())
    except (KeyError, ValueError):
        raise RecordFormatError(f"{path}: missing or malformed '# {key}:' header") from None
    return GridAxis(lo, hi, step)


def read_grid(path) -> WignerGrid:
    header, data = _read(path)
    x_axis, p_axis = _axis(header, "X", path), _axis(header, "P", path)
    if data.shape != (p_axis.count, x_axis.count):
        raise RecordFormatError(f"{path}: body shape {data.shape} does not match the axes")
    try:
        kc, n = float(header["kc"]), int(header["N"])
    except (KeyError, ValueError):
        raise RecordFormatError(f"{path}: missing kc/N headers") from None
    return WignerGrid(x_axis, p_axis, data, kc, n, header.get("state", ""))


def write_profile(path, profile: RadialProfile) -> None:
    r = profile.r
    lines = [
        f"# r: {float(r[0])!r} {float(r[-1])!r} {float(profile.r_step)!r}",
        f"# N: {profile.n_samples}",
        f"# bandwidth: {float(profile.bandwidth)!r}",
        f"# convention: {CONVENTION}",
    ]
    body = [f"{ri:.5e} {wi:.5e}" for ri, wi in zip(r, profile.w)]
    Path(path).write_text("\n".join(lines + body) + "\n", encoding="utf-8")


def read_profile(path) -> RadialProfile:
    header, data = _read(path)
    if data.ndim != 2 or data.shape[1] != 2:
        raise RecordFormatError(f"{path}: expected two columns")
    try:
        return RadialProfile(data[:, 0], data[:, 1], float(header["bandwidth"]), int(header["N"]))
    except (KeyError, ValueError):
        raise RecordFormatError(f"{path}: missing N/bandwidth headers") from None


def write_diagonals(path, estimates: list[DiagonalEstimate], n_samples: int, bootstrap_reps: int) -> None:
    lines = [
        f"# N: {n_samples}",
        f"# bootstrap_reps: {bootstrap_reps}",
        f"# convention: {CONVENTION}",
    ]
    body = [f"{e.n:d} {e.rho_nn:.5e} {e.stderr:.5e}" for e in estimates]
    Path(path).write_text("\n".join(lines + body) + "\n", encoding="utf-8")


def read_diagonals(path) -> list[DiagonalEstimate]:
    _, data = _read(path)
    if data.ndim != 2 or data.shape[1] != 3:
        raise RecordFormatError(f"{path}: expected three columns")
    return [DiagonalEstimate(int(n), float(r), float(s)) for n, r, s in data]
