"""Gaussian simulation of sub-fBm, the fundamental martingale and Vasicek/OU paths."""

from __future__ import annotations

import enum
import threading
from functools import lru_cache

import numpy as np
from scipy.signal import lfilter

from .errors import ArgumentError, NumericalError
from .grid import ProcessLabel, SamplePath, TimeGrid, VasicekParams, check_hurst
from .kernels import cov_subfbm, hurst_constants, n_midpoint_table

CHOLESKY_CAP = 4096
JITTER_START = 1e-12
JITTER_RETRIES = 3


class Method(str, enum.Enum):
    EXACT = "exact"
    EULER = "euler"


class Construction(str, enum.Enum):
    CHOLESKY = "cholesky"
    KERNEL = "kernel"


def split_seed(master: int, *keys: int) -> int:
    """Child seed for replication keys, independent of execution order.

    Uses numpy's SeedSequence with spawn_key=keys and returns the first 64-bit
    word of its state, so split_seed(m, r) is a pure function of (m, r).
    """
    ss = np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed))))


# --- Cholesky construction ----------------------------------------------

@lru_cache(maxsize=8)
def _cholesky_factor(T: float, n: int, H: float) -> np.ndarray:
    t = TimeGrid(T, n).points[1:]
    C = cov_subfbm(t[:, None], t[None, :], H)
    scale = float(np.max(np.diag(C)))
    jitter = 0.0
    for attempt in range(JITTER_RETRIES + 1):
        try:
            L = np.linalg.cholesky(C + jitter * np.eye(n) if jitter else C)
            L.setflags(write=False)
            return L
        except np.linalg.LinAlgError:
            jitter = JITTER_START * scale * 10.0**attempt
    raise NumericalError(
        f"covariance factorization failed for n = {n}, H = {H} after jitter {jitter:.1e}"
    )


def simulate_subfbm_cholesky(grid: TimeGrid, H: float, seed: int,
                             max_n: int = CHOLESKY_CAP) -> SamplePath:
    """Exact draw of zeta on the grid from the covariance matrix."""
    H = check_hurst(H)
    if grid.n > max_n:
        raise ArgumentError(f"grid size {grid.n} exceeds the Cholesky cap {max_n}")
    L = _cholesky_factor(grid.T, grid.n, H)
    z = make_rng(seed).standard_normal(grid.n)
    vals = np.concatenate([[0.0], L @ z])
    return SamplePath(grid, vals, ProcessLabel.ZETA)


# --- kernel construction --------------------------------------------------

class _GrowingTable:
    """Per-H cache of an n-independent lower-triangular table; smaller grids
    take the leading block of the largest table built so far."""

    def __init__(self, builder):
        self._builder = builder
        self._tables: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def get(self, n: int, H: float) -> np.ndarray:
        with self._lock:
            tab = self._tables.get(H)
            if tab is None or tab.shape[1] < n:
                tab = self._builder(n, H)
                tab.setflags(write=False)
                self._tables[H] = tab
        return tab[: n + 1, :n]


_N_TABLE = _GrowingTable(n_midpoint_table)


def simulate_subfbm_kernel(grid: TimeGrid, H: float, seed: int
                           ) -> tuple[SamplePath, SamplePath, SamplePath]:
    """Coupled (W, zeta, M) from one set of Brownian increments.

    zeta_i = c_H sum_j n(t_i, m_j) dW_j and M_i = d_H sum_{j<i} m_j^(1/2-H) dW_j
    with m_j the cell midpoints.
    """
    H = check_hurst(H, above_half=True)
    c = hurst_constants(H)
    dt = grid.dt
    dW = make_rng(seed).standard_normal(grid.n) * np.sqrt(dt)
    N = _N_TABLE.get(grid.n, H)
    zeta = c.cH * dt ** (H - 0.5) * (N @ dW)
    m = grid.midpoints
    M = np.concatenate([[0.0], np.cumsum(c.dH * m ** (0.5 - H) * dW)])
    W = np.concatenate([[0.0], np.cumsum(dW)])
    return (SamplePath(grid, W, ProcessLabel.W),
            SamplePath(grid, zeta, ProcessLabel.ZETA),
            SamplePath(grid, M, ProcessLabel.M))


# --- Vasicek and OU -------------------------------------------------------

def drive_vasicek(grid: TimeGrid, alpha: float, beta: float, x0: float,
                  zeta: np.ndarray, method: Method | str = Method.EXACT) -> np.ndarray:
    """X on the grid for a given noise path zeta (zeta[0] = 0)."""
    method = Method(method)
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape != (grid.n + 1,):
        raise ArgumentError(f"noise path needs {grid.n + 1} values, got {zeta.shape}")
    dt = grid.dt
    if method is Method.EULER:
        # X_{i+1} = (1 - beta dt) X_i + alpha dt + (zeta_{i+1} - zeta_i)
        drive = alpha * dt + np.diff(zeta)
        a = 1.0 - beta * dt
        x, _ = lfilter([1.0], [1.0, -a], drive, zi=[a * x0])
        return np.concatenate([[x0], x])
    t = grid.points
    e = np.exp(-beta * dt)
    # I_i = int_0^{t_i} e^{-beta (t_i - s)} zeta_s ds, trapezoid per cell
    cell = 0.5 * dt * (e * zeta[:-1] + zeta[1:])
    I = np.concatenate([[0.0], lfilter([1.0], [1.0, -e], cell)])
    decay = np.exp(-beta * t)
    return x0 * decay + alpha / beta * (1.0 - decay) + zeta - beta * I


def deterministic_part(grid: TimeGrid, alpha: float, beta: float, x0: float,
                       method: Method | str = Method.EXACT) -> np.ndarray:
    """Noise-free solution; X minus this is the OU component U."""
    method = Method(method)
    lvl = alpha / beta
    if method is Method.EULER:
        decay = (1.0 - beta * grid.dt) ** np.arange(grid.n + 1)
    else:
        decay = np.exp(-beta * grid.points)
    out = lvl + (x0 - lvl) * decay
    out[0] = x0
    return out


def _noise(grid: TimeGrid, H: float, seed: int, construction: Construction | str) -> np.ndarray:
    if Construction(construction) is Construction.KERNEL:
        return simulate_subfbm_kernel(grid, H, seed)[1].values
    return simulate_subfbm_cholesky(grid, H, seed).values


def simulate_vasicek(grid: TimeGrid, params: VasicekParams, seed: int,
                     method: Method | str = Method.EXACT,
                     construction: Construction | str = Construction.CHOLESKY,
                     zeta: SamplePath | np.ndarray | None = None) -> SamplePath:
    """Vasicek path driven by sub-fBm. Pass zeta to reuse a noise path
    (zeros give the deterministic solution)."""
    if zeta is None:
        zv = _noise(grid, params.H, seed, construction)
    else:
        zv = zeta.values if isinstance(zeta, SamplePath) else np.asarray(zeta, dtype=float)
    x = drive_vasicek(grid, params.alpha, params.beta, params.x0, zv, method)
    return SamplePath(grid, x, ProcessLabel.X, initial=params.x0)


def simulate_ou(grid: TimeGrid, beta: float, H: float, seed: int,
                method: Method | str = Method.EXACT,
                construction: Construction | str = Construction.CHOLESKY,
                zeta: SamplePath | np.ndarray | None = None) -> SamplePath:
    """dU = -beta U dt + d zeta, U_0 = 0 (the Vasicek scheme at alpha = x0 = 0)."""
    H = check_hurst(H, above_half=True)
    if not beta > 0:
        raise ArgumentError(f"beta must be positive, got {beta}")
    if zeta is None:
        zv = _noise(grid, H, seed, construction)
    else:
        zv = zeta.values if isinstance(zeta, SamplePath) else np.asarray(zeta, dtype=float)
    u = drive_vasicek(grid, 0.0, beta, 0.0, zv, method)
    return SamplePath(grid, u, ProcessLabel.U)
