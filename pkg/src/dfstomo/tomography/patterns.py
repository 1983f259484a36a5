"""Diagonal pattern functions and photon-number estimation from quadrature samples.

``f_nn(x) = d/dx [psi_n(x) phi_n(x)]`` where ``psi_n`` is the oscillator
eigenfunction and ``phi_n`` the irregular solution of the same equation,
``phi'' = (x**2 - 2n - 1) phi``, with the opposite parity to ``psi_n`` so
that ``f_nn`` is even.  ``phi_n`` is integrated outward from the origin; its
scale is fixed afterwards by requiring ``int psi_n**2 f_nn dx = 1``.
Averaging ``f_nn`` over samples taken at uniformly distributed phases
estimates ``rho_nn``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, interpolate

from .._bootstrap import bootstrap_stderr
from ..errors import ExtrapolationError, UnsupportedOrderError
from ..states import fock_wavefunctions
from .calibration import CalibratedSamples, check_phase_coverage

PATTERN_N_MAX = 10
X_TABLE_MAX = 8.0
_TABLE_STEP = 5e-4


@dataclass(frozen=True)
class DiagonalEstimate:
    n: int
    rho_nn: float
    stderr: float


@functools.lru_cache(maxsize=None)
def _table(n: int) -> interpolate.CubicSpline:
    xs = np.linspace(0.0, X_TABLE_MAX, int(round(X_TABLE_MAX / _TABLE_STEP)) + 1)
    psi = fock_wavefunctions(n + 1, xs)
    dpsi = math.sqrt(n / 2.0) * psi[n - 1] if n > 0 else np.zeros_like(xs)
    dpsi = dpsi - math.sqrt((n + 1) / 2.0) * psi[n + 1]
    energy = 2.0 * n + 1.0
    y0 = [0.0, 1.0] if n % 2 == 0 else [1.0, 0.0]
    sol = integrate.solve_ivp(
        lambda x, y: (y[1], (x * x - energy) * y[0]),
        (0.0, X_TABLE_MAX),
        y0,
        method="DOP853",
        t_eval=xs,
        rtol=1e-13,
        atol=1e-14,
    )
    if not sol.success:
        raise RuntimeError(f"irregular solution for n={n} failed: {sol.message}")
    phi, dphi = sol.y
    f = dpsi * phi + psi[n] * dphi
    norm = 2.0 * integrate.simpson(psi[n] ** 2 * f, x=xs)
    return interpolate.CubicSpline(xs, f / norm)


def pattern_function(n: int, x):
    """Diagonal pattern function ``f_nn`` evaluated at ``x`` (``|x| <= 8``)."""
    if int(n) != n or not 0 <= n <= PATTERN_N_MAX:
        raise UnsupportedOrderError(f"pattern functions are tabulated for 0 <= n <= {PATTERN_N_MAX}, got {n}")
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    if np.any(ax > X_TABLE_MAX) or not np.all(np.isfinite(x)):
        raise ExtrapolationError(f"pattern function table covers |x| <= {X_TABLE_MAX}; got max |x| = {ax.max():.3g}")
    out = _table(int(n))(ax)
    return out if out.ndim else float(out)


def pattern_matrix(x, n_max: int) -> np.ndarray:
    """``F[m, n] = f_nn(x_m)`` for ``n = 0 .. n_max``."""
    x = np.asarray(x, dtype=float)
    return np.column_stack([pattern_function(n, x) for n in range(n_max + 1)])


def estimate_diagonals(
    samples: CalibratedSamples,
    n_max: int = PATTERN_N_MAX,
    bootstrap_reps: int = 200,
    seed: int = 0,
    workers: int = 1,
) -> list[DiagonalEstimate]:
    """Estimate ``rho_nn`` for ``n = 0 .. n_max`` as sample means of the pattern functions.

    Samples with assigned phases must cover the circle; samples without phases
    (``theta is None``) are taken as phase-averaged.  Standard errors come from
    a nonparametric bootstrap over samples.
    """
    if samples.theta is not None:
        check_phase_coverage(samples.theta)
    F = pattern_matrix(samples.x, n_max)
    rho = F.mean(axis=0)
    se = bootstrap_stderr(F, bootstrap_reps, seed, workers)
    return [DiagonalEstimate(n, float(rho[n]), float(se[n])) for n in range(n_max + 1)]
