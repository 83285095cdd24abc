"""Constants, covariances, Erdelyi-Kober integrals and the singular kernels.

Conventions: k(t, s) and n(t, s) take the upper endpoint first (s < t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import DomainError, UnsupportedParameterError
from .grid import check_hurst
from .quadrature import (
    DEFAULT_SPEC,
    QuadratureSpec,
    integrate_singular,
    integrate_singular_graded,
    tail_integral,
)
from .special import gamma

__all__ = [
    "HurstConstants",
    "QuadratureSpec",
    "hurst_constants",
    "cov_subfbm",
    "cov_fbm",
    "ek_integral_right",
    "ek_integral_left",
    "psi_transform",
    "kernel_n",
    "kernel_k",
    "prediction_weight",
    "qvar_w",
    "n_profile",
    "k_antiderivative",
]


@dataclass(frozen=True)
class HurstConstants:
    H: float
    cH: float
    dH: float
    lambdaH: float
    betaH: float


@lru_cache(maxsize=256)
def _constants(H: float) -> HurstConstants:
    cH2 = gamma(2.0 * H + 1.0) * math.sin(math.pi * H) / math.pi
    cH = math.sqrt(cH2)
    dH = 2.0 ** (H - 0.5) / (cH * gamma(1.5 - H) * math.sqrt(math.pi))
    if H == 0.5:
        # the formulas above collapse to these; pin them against round-off
        cH, dH = 1.0 / math.sqrt(math.pi), 1.0
    lam = dH * dH / (2.0 - 2.0 * H)
    return HurstConstants(H=H, cH=cH, dH=dH, lambdaH=lam, betaH=2.0 - 2.0 ** (2.0 * H - 1.0))


def hurst_constants(H: float) -> HurstConstants:
    return _constants(check_hurst(H))


def _nonneg(name, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise DomainError(f"{name} must be a finite non-negative time")
    return x


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def cov_subfbm(s, t, H: float):
    """s^2H + t^2H - ((s+t)^2H + |s-t|^2H)/2. Vectorized."""
    H = check_hurst(H)
    s, t = _nonneg("s", s), _nonneg("t", t)
    h2 = 2.0 * H
    return _out(s**h2 + t**h2 - 0.5 * ((s + t) ** h2 + np.abs(s - t) ** h2))


def cov_fbm(s, t, H: float):
    H = check_hurst(H)
    s, t = _nonneg("s", s), _nonneg("t", t)
    h2 = 2.0 * H
    return _out(0.5 * (t**h2 + s**h2 - np.abs(t - s) ** h2))


def qvar_w(t, H: float):
    """Quadratic variation of the fundamental martingale, lambda_H t^(2-2H)."""
    c = hurst_constants(H)
    t = _nonneg("t", t)
    return _out(c.lambdaH * t ** (2.0 - 2.0 * H))


def _power_gap_ratio(s, d, sigma):
    """((s+d)^sigma - s^sigma)/d for d of either sign, stable as d -> 0."""
    return s**sigma * np.expm1(sigma * np.log1p(d / s)) / d


def _check_ek(alpha, sigma):
    if not alpha > 0:
        raise DomainError(f"fractional order alpha must be positive, got {alpha}")
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")


def ek_integral_right(f: Callable, alpha: float, sigma: float, eta: float, s: float,
                      T: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Right-sided Erdelyi-Kober integral

        sigma s^(sigma eta)/Gamma(alpha) int_s^T t^(sigma(1-alpha-eta)-1) f(t) (t^sigma - s^sigma)^(alpha-1) dt.
    """
    _check_ek(alpha, sigma)
    if not 0 < s < T:
        raise DomainError(f"need 0 < s < T, got s={s}, T={T}")
    p = alpha - 1.0
    e1 = sigma * (1.0 - alpha - eta) - 1.0

    def g(d):
        t = s + d
        return t**e1 * f(t) * _power_gap_ratio(s, d, sigma) ** p

    val = integrate_singular(g, s, T, p, spec)
    return sigma * s ** (sigma * eta) / gamma(alpha) * val


def ek_integral_left(f: Callable, alpha: float, sigma: float, eta: float, s: float,
                     T: float | None = None, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Left-sided Erdelyi-Kober integral

        sigma s^(-sigma(alpha+eta))/Gamma(alpha) int_0^s t^(sigma(1+eta)-1) f(t) (s^sigma - t^sigma)^(alpha-1) dt.

    At s = 0 the limit f(0) Gamma(1+eta)/Gamma(1+eta+alpha) is returned.
    """
    _check_ek(alpha, sigma)
    if s < 0 or (T is not None and s > T):
        raise DomainError(f"need 0 <= s <= T, got s={s}, T={T}")
    p0 = sigma * (1.0 + eta) - 1.0
    if not p0 > -1.0:
        raise DomainError("left Erdelyi-Kober integral diverges at 0 (need sigma(1+eta) > 0)")
    if s == 0:
        return float(f(np.array([0.0]))[0]) * gamma(1.0 + eta) / gamma(1.0 + eta + alpha)
    p = alpha - 1.0
    mid = 0.5 * s

    def g_upper(d):
        # d = s - t
        t = s - d
        return t**p0 * f(t) * _power_gap_ratio(s, -d, sigma) ** p

    def g_lower(t):
        return f(t) * (s**sigma - t**sigma) ** p

    half = QuadratureSpec(max(1, spec.panels // 2), spec.nodes_per_panel)
    v = integrate_singular(g_lower, 0.0, mid, p0, half)
    v += integrate_singular(g_upper, mid, s, p, half, side="right")
    return sigma * s ** (-sigma * (alpha + eta)) / gamma(alpha) * v


def psi_transform(f: Callable, s: float, H: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """(psi_H f)(s): the fractional operator that turns a drift f into the
    sub-fBm-side drift. Maps constants to themselves."""
    H = check_hurst(H, above_half=True)
    val = ek_integral_left(f, H - 0.5, 2.0, 0.5 - H, s, spec=spec)
    return val / gamma(1.5 - H)


def kernel_n(t: float, s: float, H: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Kernel of the Wiener-integral representation zeta_t = c_H int n(t,s) dW_s."""
    H = check_hurst(H, above_half=True)
    if not s > 0:
        raise DomainError(f"kernel_n needs s > 0, got {s}")
    if s >= t:
        return 0.0
    v = ek_integral_right(lambda u: u ** (H - 0.5), H - 0.5, 2.0, (3.0 - 2.0 * H) / 4.0,
                          s, t, spec)
    return math.sqrt(math.pi) / 2.0 ** (H - 0.5) * v


def kernel_k(t: float, s: float, H: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Kernel of the fundamental martingale M_t = int_0^t k(t,s) d zeta_s.

    k(t,s) = d_H^2 s [t^-1 (t^2-s^2)^(1/2-H) + int_s^t x^-2 (x^2-s^2)^(1/2-H) dx]
    """
    H = check_hurst(H)
    if H < 0.5:
        raise UnsupportedParameterError(f"kernel_k requires H >= 1/2, got {H}")
    if not s > 0:
        raise DomainError(f"kernel_k needs s > 0, got {s}")
    if s >= t:
        return 0.0
    c = hurst_constants(H)
    p = 0.5 - H
    inner = integrate_singular_graded(lambda d: (s + d) ** -2.0 * (2.0 * s + d) ** p,
                                      s, t, p, s, spec)
    return c.dH**2 * s * ((t * t - s * s) ** p / t + inner)


def prediction_weight(a: float, t: float, u: float, H: float,
                      spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Weight psi_{a,t}(u) in E[zeta_t | zeta_r, r <= a] = zeta_a + int_0^a psi dzeta.

    psi = 2 sin(pi(H-1/2))/pi * u (a^2-u^2)^(1/2-H) int_a^t (z^2-a^2)^(H-1/2)/(z^2-u^2) dz
    """
    H = check_hurst(H)
    if not (0 < u < a <= t):
        raise DomainError(f"prediction weight needs 0 < u < a < t, got u={u}, a={a}, t={t}")
    if H == 0.5 or t == a:
        return 0.0
    p = H - 0.5
    delta = a - u

    def g(d):
        # z = a + d
        return (2.0 * a + d) ** p / ((delta + d) * (a + d + u))

    # 1/(z-u) peaks within a - u of the left end
    inner = integrate_singular_graded(g, a, t, p, delta, spec)
    pref = 2.0 * math.sin(math.pi * p) / math.pi
    return pref * u * (a * a - u * u) ** (-p) * inner


# --- bulk profiles -------------------------------------------------------
# Both kernels are homogeneous, so dense grid tables reduce to 1-D profiles.


def n_profile(r, H: float) -> np.ndarray:
    """N1(r) = int_1^r (y^2-1)^(H-3/2) dy for r >= 1.

    kernel_n(t, s) = 2^(3/2-H) sqrt(pi)/Gamma(H-1/2) s^(H-1/2) N1(t/s).
    """
    H = check_hurst(H, above_half=True)
    r = np.asarray(r, dtype=float)
    if np.any(r < 1):
        raise DomainError("n_profile needs r >= 1")
    out = 0.5 * tail_integral(1.0 / (r * r), -H, H - 1.5)
    return np.where(r == 1.0, 0.0, out)


def n_prefactor(H: float) -> float:
    return 2.0 ** (1.5 - H) * math.sqrt(math.pi) / gamma(H - 0.5)


def _k_core(x: np.ndarray, H: float) -> np.ndarray:
    """-(1-x^2)^(3/2-H) - int_x^1 y^-2 (y^2-x^2)^(3/2-H) dy on [0, 1]."""
    q = 1.5 - H
    x = np.asarray(x, dtype=float)
    pos = x > 0
    inner = np.full(x.shape, 1.0 / (2.0 - 2.0 * H))
    if pos.any():
        xp = x[pos]
        inner[pos] = 0.5 * xp ** (2.0 - 2.0 * H) * tail_integral(xp * xp, H - 2.0, q)
    inner = np.where(x >= 1.0, 0.0, inner)
    return -np.clip(1.0 - x * x, 0.0, None) ** q - inner


def k_antiderivative(x, H: float) -> np.ndarray:
    """K(x) = int_0^x k(1, v) dv for x in [0, 1]; K(1) = lambda_H."""
    H = check_hurst(H)
    if H < 0.5:
        raise UnsupportedParameterError(f"k_antiderivative requires H >= 1/2, got {H}")
    x = np.asarray(x, dtype=float)
    if np.any((x < 0) | (x > 1)):
        raise DomainError("k_antiderivative needs 0 <= x <= 1")
    c = hurst_constants(H)
    return c.dH**2 / (3.0 - 2.0 * H) * (1.0 + 1.0 / (2.0 - 2.0 * H) + _k_core(x, H))


def k_cell_table(n: int, H: float) -> np.ndarray:
    """G[i, j] = int_{j}^{j+1} k(i, v) dv on the integer grid, 0 <= j < i <= n.

    Scaling gives int_{t_j}^{t_{j+1}} k(t_i, s) ds = dt^(2-2H) G[i, j].
    Row sums equal lambda_H i^(2-2H) up to round-off.
    """
    c = hurst_constants(H)
    ii, jj = np.tril_indices(n, 0)
    ii = ii + 1  # rows 1..n, j = 0..i-1
    x0 = jj / ii
    x1 = (jj + 1) / ii
    xs, inv = np.unique(np.concatenate([x0, x1]), return_inverse=True)
    core = np.empty_like(xs)
    chunk = 65536
    for k in range(0, xs.size, chunk):
        core[k:k + chunk] = _k_core(xs[k:k + chunk], H)
    m = ii.size
    diff = core[inv[m:]] - core[inv[:m]]
    G = np.zeros((n + 1, n))
    G[ii, jj] = c.dH**2 / (3.0 - 2.0 * H) * ii ** (2.0 - 2.0 * H) * diff
    return G


def n_midpoint_table(n: int, H: float) -> np.ndarray:
    """Nt[i, j] = n(i, j + 1/2) on the integer grid (zero for j >= i).

    kernel_n(t_i, m_j) = dt^(H-1/2) Nt[i, j].
    """
    ii, jj = np.tril_indices(n, 0)
    ii = ii + 1
    r = 2.0 * ii / (2.0 * jj + 1.0)
    rs, inv = np.unique(r, return_inverse=True)
    prof = np.empty_like(rs)
    chunk = 65536
    for k in range(0, rs.size, chunk):
        prof[k:k + chunk] = n_profile(rs[k:k + chunk], H)
    N = np.zeros((n + 1, n))
    N[ii, jj] = n_prefactor(H) * (jj + 0.5) ** (H - 0.5) * prof[inv]
    return N
