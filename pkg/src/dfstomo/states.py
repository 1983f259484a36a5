"""Single-mode optical states: wavefunctions, marginals, Wigner functions, photon statistics.

Quadrature convention used throughout the package: ``x = (a + a^dagger)/sqrt(2)``,
so the vacuum quadrature variance is 1/2, the vacuum Wigner function is
``exp(-X**2 - P**2)/pi`` and a displacement ``D(alpha)`` moves the Wigner
function by ``(sqrt(2) Re alpha, sqrt(2) Im alpha)``.  Phase-space axes that put
the coherent peak at ``(Re alpha, Im alpha)`` are these axes divided by sqrt(2).

Every state handled here is a convex mixture of displaced Fock states
``D(alpha)|n>`` with ``n`` in {0, 1}; :meth:`StateModel.components` exposes that
decomposition and all evaluators are written against it.
"""

from __future__ import annotations

import cmath
import math
import re
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import linalg, special, stats

from .errors import (
    ConfigError,
    InadequateDimensionError,
    TruncationError,
    TruncationWarning,
    UnsupportedOrderError,
)

ALPHA_MAX = 16.0
FOCK_N_MAX = 64
STATS_TAIL_WARN = 1e-6
BEAMSPLITTER_TAIL_MAX = 1e-8

KINDS = ("vacuum", "coherent", "fock", "displaced_fock", "displaced_mix")


def _check_alpha(alpha) -> complex:
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ConfigError(f"displacement amplitude must be finite, got {alpha!r}")
    if abs(alpha) > ALPHA_MAX:
        raise ConfigError(f"|alpha| = {abs(alpha):.3g} exceeds the supported bound {ALPHA_MAX}")
    return alpha


def _fmt_real(v: float) -> str:
    s = f"{v:.2f}"
    return s if float(s) == v else repr(float(v))


def format_alpha(alpha: complex) -> str:
    """Text form used in state descriptions, e.g. ``0.60+0.00i``."""
    im = alpha.imag
    sign = "-" if (im < 0 or (im == 0 and math.copysign(1.0, im) < 0)) else "+"
    return f"{_fmt_real(alpha.real)}{sign}{_fmt_real(abs(im))}i"


def parse_alpha(text: str) -> complex:
    t = text.strip().replace(" ", "")
    if t.endswith("i"):
        t = t[:-1] + "j"
    try:
        return complex(t)
    except ValueError:
        raise ConfigError(f"cannot parse complex amplitude {text!r}") from None


@dataclass(frozen=True)
class StateModel:
    """Description of the optical ensemble under test.

    Use the named constructors (:meth:`vacuum`, :meth:`coherent`, :meth:`fock`,
    :meth:`displaced_fock`, :meth:`displaced_mix`) rather than the raw fields.
    ``displaced_mix`` is ``eta D|1><1|D^dagger + (1-eta)|alpha><alpha|``.
    """

    kind: str
    alpha: complex = 0j
    n: int = 0
    eta: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown state kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        if self.kind in ("fock", "displaced_fock"):
            if int(self.n) != self.n or self.n not in (0, 1):
                raise ConfigError(f"photon number must be 0 or 1, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
        eta = float(self.eta)
        if not 0.0 <= eta <= 1.0:
            raise ConfigError(f"eta must lie in [0, 1], got {self.eta!r}")
        object.__setattr__(self, "eta", eta)

    @classmethod
    def vacuum(cls) -> StateModel:
        return cls("vacuum")

    @classmethod
    def coherent(cls, alpha) -> StateModel:
        return cls("coherent", alpha=alpha)

    @classmethod
    def fock(cls, n: int) -> StateModel:
        return cls("fock", n=n)

    @classmethod
    def displaced_fock(cls, alpha, n: int = 1) -> StateModel:
        return cls("displaced_fock", alpha=alpha, n=n)

    @classmethod
    def displaced_mix(cls, alpha, eta: float) -> StateModel:
        return cls("displaced_mix", alpha=alpha, eta=eta)

    def components(self) -> list[tuple[float, complex, int]]:
        """Decomposition into ``(weight, alpha, n)`` displaced Fock terms, zero weights dropped."""
        if self.kind == "vacuum":
            terms = [(1.0, 0j, 0)]
        elif self.kind == "coherent":
            terms = [(1.0, self.alpha, 0)]
        elif self.kind == "fock":
            terms = [(1.0, 0j, self.n)]
        elif self.kind == "displaced_fock":
            terms = [(1.0, self.alpha, self.n)]
        else:
            terms = [(self.eta, self.alpha, 1), (1.0 - self.eta, self.alpha, 0)]
        return [t for t in terms if t[0] > 0.0]

    def equivalent(self, other: StateModel) -> bool:
        """True when both descriptions denote the same density operator."""
        return sorted(self.components(), key=_term_key) == sorted(other.components(), key=_term_key)

    @property
    def is_phase_symmetric(self) -> bool:
        return all(a == 0 for _, a, _ in self.components())

    def with_eta(self, eta: float) -> StateModel:
        if self.kind != "displaced_mix":
            raise ConfigError(f"efficiency override needs a displaced_mix state, got {self.kind}")
        return StateModel.displaced_mix(self.alpha, eta)

    def to_text(self) -> str:
        if self.kind == "vacuum":
            return "vacuum"
        if self.kind == "coherent":
            return f"coherent alpha={format_alpha(self.alpha)}"
        if self.kind == "fock":
            return f"fock n={self.n}"
        if self.kind == "displaced_fock":
            return f"displaced_fock alpha={format_alpha(self.alpha)} n={self.n}"
        return f"displaced_mix alpha={format_alpha(self.alpha)} eta={_fmt_real(self.eta)}"

    @classmethod
    def from_text(cls, text: str) -> StateModel:
        """Parse the canonical text form, e.g. ``displaced_mix alpha=0.60+0.00i eta=0.62``."""
        parts = text.split()
        if not parts:
            raise ConfigError("empty state description")
        kind, params = parts[0], {}
        for token in parts[1:]:
            key, sep, value = token.partition("=")
            if not sep:
                raise ConfigError(f"malformed state parameter {token!r}")
            params[key] = value
        allowed = {
            "vacuum": set(),
            "coherent": {"alpha"},
            "fock": {"n"},
            "displaced_fock": {"alpha", "n"},
            "displaced_mix": {"alpha", "eta"},
        }
        if kind not in allowed:
            raise ConfigError(f"unknown state kind {kind!r}")
        if set(params) != allowed[kind]:
            raise ConfigError(f"{kind} expects parameters {sorted(allowed[kind])}, got {sorted(params)}")
        kw = {}
        if "alpha" in params:
            kw["alpha"] = parse_alpha(params["alpha"])
        if "n" in params:
            if not re.fullmatch(r"\d+", params["n"]):
                raise ConfigError(f"photon number must be a nonnegative integer, got {params['n']!r}")
            kw["n"] = int(params["n"])
        if "eta" in params:
            try:
                kw["eta"] = float(params["eta"])
            except ValueError:
                raise ConfigError(f"cannot parse eta {params['eta']!r}") from None
        return cls(kind, **kw)

    def __str__(self):
        return self.to_text()


def _term_key(term):
    w, a, n = term
    return (n, a.real, a.imag, w)


def displacement_vector(alpha) -> tuple[float, float]:
    """Phase-space shift ``(X0, P0)`` produced by ``D(alpha)``."""
    alpha = complex(alpha)
    return math.sqrt(2.0) * alpha.real, math.sqrt(2.0) * alpha.imag


def mean_quadrature(alpha, theta):
    """Mean of the quadrature ``x_theta`` for a state displaced by ``alpha``."""
    alpha = complex(alpha)
    return math.sqrt(2.0) * (alpha.real * np.cos(theta) + alpha.imag * np.sin(theta))


def fock_wavefunctions(n_max: int, x) -> np.ndarray:
    """All oscillator eigenfunctions ``psi_0 .. psi_{n_max}`` at ``x``.

    Uses the normalized three-term recurrence, which needs no factorials and is
    stable for the supported orders.  The result has shape ``(n_max + 1,) + x.shape``.
    """
    if n_max < 0 or n_max > FOCK_N_MAX:
        raise UnsupportedOrderError(f"photon number must be in [0, {FOCK_N_MAX}], got {n_max}")
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi**-0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for k in range(1, n_max):
        out[k + 1] = math.sqrt(2.0 / (k + 1)) * x * out[k] - math.sqrt(k / (k + 1)) * out[k - 1]
    return out


def fock_wavefunction(n: int, x):
    """Position-representation wavefunction ``<x|n>`` (real)."""
    if int(n) != n or n < 0 or n > FOCK_N_MAX:
        raise UnsupportedOrderError(f"photon number must be an integer in [0, {FOCK_N_MAX}], got {n}")
    out = fock_wavefunctions(int(n), x)[int(n)]
    return out if out.ndim else float(out)


def marginal_pdf(state: StateModel, theta, x):
    """Probability density of the homodyne outcome ``x`` at local-oscillator phase ``theta``.

    ``theta`` and ``x`` broadcast against each other.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.asarray(x, dtype=float)
    total = np.zeros(np.broadcast(theta, x).shape)
    for w, alpha, n in state.components():
        y = x - mean_quadrature(alpha, theta)
        total = total + w * fock_wavefunction(n, y) ** 2
    return total if total.ndim else float(total)


def wigner_analytic(state: StateModel, X, P):
    """Closed-form Wigner function, normalized to unit integral over the ``(X, P)`` plane."""
    X = np.asarray(X, dtype=float)
    P = np.asarray(P, dtype=float)
    total = np.zeros(np.broadcast(X, P).shape)
    for w, alpha, n in state.components():
        x0, p0 = displacement_vector(alpha)
        r2 = (X - x0) ** 2 + (P - p0) ** 2
        total = total + w * (-1) ** n * special.eval_laguerre(n, 2.0 * r2) * np.exp(-r2) / np.pi
    return total if total.ndim else float(total)


def _displaced_fock_stats(alpha: complex, n: int, m: np.ndarray) -> np.ndarray:
    x = abs(alpha) ** 2
    if x == 0.0:
        return (m == n).astype(float)
    if n == 0:
        return stats.poisson.pmf(m, x)
    # n == 1: e^{-x} x^{m-1} (m - x)^2 / m!
    logx = math.log(x)
    out = np.exp(-x + (m - 1) * logx - special.gammaln(m + 1)) * (m - x) ** 2
    return out


def photon_statistics(state: StateModel, m_max: int) -> np.ndarray:
    """Photon-number distribution ``P(m)`` for ``m = 0 .. m_max``.

    Emits :class:`TruncationWarning` when more than ``1e-6`` of the probability
    lies above ``m_max``.
    """
    if m_max < 0 or m_max > FOCK_N_MAX:
        raise UnsupportedOrderError(f"m_max must be in [0, {FOCK_N_MAX}], got {m_max}")
    m = np.arange(m_max + 1)
    p = np.zeros(m_max + 1)
    for w, alpha, n in state.components():
        p += w * _displaced_fock_stats(alpha, n, m)
    tail = 1.0 - p.sum()
    if tail > STATS_TAIL_WARN:
        warnings.warn(
            f"photon statistics truncated at m_max={m_max} miss {tail:.2e} probability",
            TruncationWarning,
            stacklevel=2,
        )
    return p


def min_displacement_dim(alpha) -> int:
    return math.ceil(4.0 * (1.0 + abs(complex(alpha)) ** 2))


def displacement_matrix(alpha, dim: int) -> np.ndarray:
    """``exp(alpha a^dagger - alpha* a)`` with the ladder operators cut at ``dim``.

    The result is exactly unitary in the truncated space.  Entries far from
    the cut agree with the untruncated matrix elements to rounding error;
    rows and columns near ``dim`` do not, so callers keep a margin.
    """
    alpha = _check_alpha(alpha)
    if dim < min_displacement_dim(alpha):
        raise InadequateDimensionError(
            f"dim={dim} is below the adequacy bound {min_displacement_dim(alpha)} for |alpha|={abs(alpha):.3g}"
        )
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    a = np.diag(np.sqrt(np.arange(1.0, dim)), 1).astype(complex)
    return linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)


def fock_vector(n: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def density_matrix(state: StateModel, dim: int) -> np.ndarray:
    """Density matrix of ``state`` in the Fock basis truncated at ``dim``."""
    rho = np.zeros((dim, dim), dtype=complex)
    for w, alpha, n in state.components():
        # padded so the truncation edge stays clear of the kept block
        col = displacement_matrix(alpha, max(dim, min_displacement_dim(alpha)) + 32)[:dim, n]
        rho += w * np.outer(col, col.conj())
    return rho


def fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    """Fidelity ``<psi|rho|psi>`` of a density matrix with a pure state."""
    return float(np.real(np.vdot(psi, rho @ psi)))


def beamsplitter_reduced_state(T: float, alpha_in, n: int, dim: int) -> np.ndarray:
    """Exact state leaving the reflected port when ``|n>`` meets ``|alpha_in>`` on a beamsplitter.

    The beamsplitter has real transmission ``T`` and reflectivity ``R = 1 - T``;
    the signal mode ``|n>`` is reflected into the output of interest with
    amplitude ``sqrt(R)`` and the coherent beam leaks in with amplitude
    ``sqrt(T)``.  The joint output is built amplitude by amplitude in the
    two-mode Fock basis, with the transmitted-port photon number restricted to
    the window carrying the coherent beam, and the transmitted port is traced
    out.

    Args:
        T: beamsplitter transmission, ``0 < T < 0.5``.
        alpha_in: coherent amplitude entering the second port.
        n: photon number of the signal, 0 or 1.
        dim: Fock cutoff for the reflected mode.

    Returns:
        ``dim x dim`` density matrix of the reflected mode.

    Raises:
        TruncationError: if the truncated joint state misses more than 1e-8
            of the norm.
    """
    if not 0.0 < T < 0.5:
        raise ConfigError(f"transmission must lie in (0, 0.5), got {T}")
    if n not in (0, 1):
        raise ConfigError(f"signal photon number must be 0 or 1, got {n}")
    alpha_in = complex(alpha_in)
    if not (math.isfinite(alpha_in.real) and math.isfinite(alpha_in.imag)):
        raise ConfigError("alpha_in must be finite")
    R = 1.0 - T
    mu = abs(alpha_in) ** 2
    if dim < min_displacement_dim(math.sqrt(T) * abs(alpha_in)) or dim <= n:
        raise InadequateDimensionError(f"dim={dim} too small for sqrt(T)*alpha_in and n={n}")

    # photon numbers k of the coherent input that carry non-negligible weight
    if mu > 0:
        k_lo = int(stats.poisson.ppf(1e-14, mu))
        k_hi = int(stats.poisson.isf(1e-14, mu)) + 1
    else:
        k_lo = k_hi = 0
    ks = np.arange(k_lo, k_hi + 1)
    if mu > 0:
        log_ck = -0.5 * mu + ks * math.log(math.sqrt(mu)) - 0.5 * special.gammaln(ks + 1)
    else:
        log_ck = np.zeros(1)
    ck_phase = np.exp(1j * ks * cmath.phase(alpha_in)) if mu > 0 else np.ones(1, dtype=complex)
    ck = np.exp(log_ck) * ck_phase

    m = np.arange(dim)[:, None]
    k = ks[None, :]
    lT, lR = math.log(T), math.log(R)

    def log_binom(a, b):
        return special.gammaln(a + 1) - special.gammaln(b + 1) - special.gammaln(a - b + 1)

    # amplitudes <m, j| U |n, k>, indexed by (m, k); j = k + n - m
    amp = np.zeros((dim, ks.size))
    valid0 = m <= k
    if n == 0:
        with np.errstate(invalid="ignore", divide="ignore"):
            la = 0.5 * log_binom(k, m) + 0.5 * m * lT + 0.5 * (k - m) * lR
        amp = np.where(valid0, np.exp(np.where(valid0, la, -np.inf)), 0.0)
    else:
        valid1 = (m >= 1) & (m - 1 <= k)
        with np.errstate(invalid="ignore", divide="ignore"):
            l1 = 0.5 * np.log(np.maximum(m, 1)) + 0.5 * log_binom(k, m - 1) + 0.5 * (m - 1) * lT + 0.5 * (k - m + 2) * lR
            l2 = 0.5 * np.log(np.maximum(k - m + 1, 1)) + 0.5 * log_binom(k, m) + 0.5 * (m + 1) * lT + 0.5 * (k - m) * lR
        t1 = np.where(valid1, np.exp(np.where(valid1, l1, -np.inf)), 0.0)
        t2 = np.where(valid0, np.exp(np.where(valid0, l2, -np.inf)), 0.0)
        amp = t1 - t2

    # psi[m, j] for j = k + n - m; rows of fixed j are gathered by shifting
    j_all = np.arange(max(0, k_lo + n - (dim - 1)), k_hi + n + 1)
    psi = np.zeros((dim, j_all.size), dtype=complex)
    for mi in range(dim):
        kk = j_all + mi - n
        sel = (kk >= k_lo) & (kk <= k_hi)
        idx = kk[sel] - k_lo
        psi[mi, sel] = ck[idx] * amp[mi, idx]

    lost = 1.0 - float(np.sum(np.abs(psi) ** 2))
    if lost > BEAMSPLITTER_TAIL_MAX:
        raise TruncationError(f"truncated two-mode state misses {lost:.2e} of its norm (dim={dim})")
    return psi @ psi.conj().T
