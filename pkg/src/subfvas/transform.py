"""Martingale-domain transforms of an observed path.

Discretization. With W[i, j] = int_{t_j}^{t_{j+1}} k(t_i, s) ds (exact cell
integrals of the kernel, see kernels.k_cell_table):

    z_i = sum_j W[i, j] (x_{j+1} - x_j)/dt      X piecewise linear
    F_i = sum_j W[i, j] x_j                     X frozen at the left end
    P on cell i = (F_{i+1} - F_i)/(w_{i+1} - w_i)

P is constant on each cell and depends on x_0..x_i only (predictable). Row
sums of W equal w exactly, so J = 1 to round-off, and for the Euler
recursion x_{j+1} - x_j = (alpha - beta x_j) dt the drift identity
z = int (alpha J - beta P) dw holds exactly cell by cell.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ArgumentError
from .grid import ProcessLabel, SamplePath, TimeGrid, check_hurst
from .kernels import k_cell_table, prediction_weight, qvar_w
from .simulate import _GrowingTable

BURN_IN = 2
MIN_STEPS = 16

_K_TABLE = _GrowingTable(k_cell_table)


@dataclass(frozen=True)
class TransformedPath:
    """Per-node arrays of length n+1. Cell-valued processes (pH, j, vH,
    pTilde) hold the value on [t_i, t_{i+1}] at index i; index n repeats n-1."""

    grid: TimeGrid
    H: float
    z: np.ndarray
    w: np.ndarray
    pH: np.ndarray
    j: np.ndarray | None = None
    vH: np.ndarray | None = None
    pTilde: np.ndarray | None = None
    burn_in: int = BURN_IN


def _check(grid: TimeGrid, H: float) -> float:
    H = check_hurst(H, above_half=True)
    if grid.n < MIN_STEPS:
        raise ArgumentError(f"grid too coarse: n = {grid.n} < {MIN_STEPS}")
    return H


def k_weights(grid: TimeGrid, H: float) -> np.ndarray:
    """W[i, j] = int over cell j of k(t_i, s) ds, shape (n+1, n)."""
    H = _check(grid, H)
    return grid.dt ** (2.0 - 2.0 * H) * _K_TABLE.get(grid.n, H)


def w_grid(grid: TimeGrid, H: float) -> np.ndarray:
    return qvar_w(grid.points, H)


def _values(x) -> np.ndarray:
    return x.values if isinstance(x, SamplePath) else np.asarray(x, dtype=float)


def _z_from(W: np.ndarray, v: np.ndarray, dt: float) -> np.ndarray:
    return W @ (np.diff(v) / dt)


def _cell_derivative(W: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    F = W @ v[:-1]
    d = np.diff(F) / np.diff(w)
    return np.append(d, d[-1])


def transform_z(x: SamplePath, H: float) -> np.ndarray:
    """Z_t = int_0^t k(t,s) dX_s on the grid; z[0] = 0."""
    W = k_weights(x.grid, H)
    return _z_from(W, _values(x), x.grid.dt)


def transform_pH(x: SamplePath, H: float) -> np.ndarray:
    """d/dw of int_0^t k(t,s) x(s) ds, one value per cell."""
    W = k_weights(x.grid, H)
    return _cell_derivative(W, _values(x), w_grid(x.grid, H))


def transform_auxiliary(beta: float | None, u: SamplePath | None, H: float, grid: TimeGrid,
                        want_tilde: bool = False):
    """(J, V_H, P-tilde): the derivative transform applied to 1, e^{-beta s} and U."""
    W = k_weights(grid, H)
    w = w_grid(grid, H)
    t = grid.points
    j = _cell_derivative(W, np.ones(grid.n + 1), w)
    vH = None
    if beta is not None:
        if not beta > 0:
            raise ArgumentError(f"beta must be positive for V_H, got {beta}")
        vH = _cell_derivative(W, np.exp(-beta * t), w)
    if u is None:
        if want_tilde:
            raise ArgumentError("P-tilde requested but no U path supplied")
        return j, vH, None
    return j, vH, _cell_derivative(W, _values(u), w)


def transform_path(x: SamplePath, H: float, beta: float | None = None,
                   u: SamplePath | None = None) -> TransformedPath:
    """Every martingale-domain object for one observed path."""
    W = k_weights(x.grid, H)
    w = w_grid(x.grid, H)
    v = _values(x)
    z = _z_from(W, v, x.grid.dt)
    pH = _cell_derivative(W, v, w)
    j, vH, pt = transform_auxiliary(beta, u, H, x.grid)
    return TransformedPath(x.grid, H, z, w, pH, j, vH, pt)


# --- integrals ------------------------------------------------------------

def _pair(f, g):
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1:
        raise ArgumentError(f"length mismatch: {f.shape} vs {g.shape}")
    return f, g


def stieltjes_dz(f, z, start: int = 0) -> float:
    """Left-endpoint sum sum_{i >= start} f[i] (z[i+1] - z[i])."""
    f, z = _pair(f, z)
    return float(np.dot(f[start:-1], np.diff(z[start:])))


def stieltjes_dw(f, w, start: int = 0) -> float:
    """Trapezoid sum for a node-valued integrand against the deterministic w."""
    f, w = _pair(f, w)
    return float(np.dot(0.5 * (f[start:-1] + f[start + 1:]), np.diff(w[start:])))


def cell_integral(f, g, start: int = BURN_IN) -> float:
    """Exact integral of a cell-valued f against dg over cells i >= start.

    For cell-valued integrands this is the same sum as stieltjes_dz.
    """
    return stieltjes_dz(f, g, start)


def q_process(alpha: float, beta: float, pH, j) -> np.ndarray:
    """Q_H = alpha J - beta P_H."""
    pH, j = _pair(pH, j)
    return alpha * j - beta * pH


# --- prediction -------------------------------------------------------------

@lru_cache(maxsize=32)
def _prediction_weights(T: float, n: int, ia: int, t: float, H: float) -> np.ndarray:
    grid = TimeGrid(T, n)
    a = grid.points[ia]
    m = grid.midpoints[:ia]
    out = np.array([prediction_weight(a, t, float(u), H) for u in m])
    out.setflags(write=False)
    return out


def prediction_weights(grid: TimeGrid, a: float, t: float, H: float) -> np.ndarray:
    """psi_{a,t} at the midpoints of the cells inside (0, a)."""
    ia = grid.index_of(a)
    return _prediction_weights(grid.T, grid.n, ia, float(t), check_hurst(H))


def predict(zeta: SamplePath, a: float, t: float, H: float) -> float:
    """E[zeta_t | zeta_r, r <= a] approximated on the grid."""
    if zeta.label is not ProcessLabel.ZETA:
        raise ArgumentError(f"predict needs a ZETA path, got {zeta.label.value}")
    grid = zeta.grid
    ia = grid.index_of(a)
    if t < a:
        raise ArgumentError(f"prediction time t = {t} precedes a = {a}")
    za = float(zeta.values[ia])
    H = check_hurst(H)
    if t == a or H == 0.5 or ia == 0:
        return za
    psi = prediction_weights(grid, a, t, H)
    return za + float(np.dot(psi, np.diff(zeta.values[: ia + 1])))
