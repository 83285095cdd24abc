"""Grid, path and parameter containers."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, DomainError, UnsupportedParameterError


class ProcessLabel(str, enum.Enum):
    W = "W"
    ZETA = "ZETA"
    M = "M"
    X = "X"
    U = "U"
    Z = "Z"


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_i = i*T/n, i = 0..n."""

    T: float
    n: int

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 0):
            raise DomainError(f"horizon T must be positive, got {self.T}")
        if int(self.n) != self.n or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "n", int(self.n))

    @property
    def dt(self) -> float:
        return self.T / self.n

    @property
    def points(self) -> np.ndarray:
        t = np.arange(self.n + 1) * self.T / self.n
        t[-1] = self.T
        return t

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.T / self.n

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        """Index of a time that lies on the grid."""
        k = round(t / self.dt)
        if k < 0 or k > self.n or abs(k * self.dt - t) > tol * max(1.0, abs(t)):
            raise ArgumentError(f"time {t} is not a grid point of {self}")
        return int(k)


@dataclass(frozen=True)
class SamplePath:
    grid: TimeGrid
    values: np.ndarray
    label: ProcessLabel
    initial: float = 0.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size != self.grid.n + 1:
            raise ArgumentError(
                f"path needs {self.grid.n + 1} values, got shape {v.shape}"
            )
        if not np.all(np.isfinite(v)):
            raise ArgumentError("path contains non-finite values")
        label = ProcessLabel(self.label)
        if label is not ProcessLabel.X and self.initial != 0.0:
            raise ArgumentError(f"{label.value} paths start at 0")
        if v[0] != self.initial:
            raise ArgumentError(
                f"{label.value} path starts at {v[0]}, expected {self.initial}"
            )
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "label", label)

    @property
    def times(self) -> np.ndarray:
        return self.grid.points


def check_hurst(H: float, *, above_half: bool = False) -> float:
    H = float(H)
    if not (0.0 < H < 1.0):
        raise DomainError(f"Hurst index must lie in (0, 1), got {H}")
    if above_half and not H > 0.5:
        raise UnsupportedParameterError(f"operation requires H > 1/2, got H = {H}")
    return H


@dataclass(frozen=True)
class VasicekParams:
    """dX = (alpha - beta X) dt + d zeta, X_0 = x0."""

    alpha: float
    beta: float
    x0: float
    H: float

    def __post_init__(self):
        for name in ("alpha", "beta", "x0", "H"):
            val = float(getattr(self, name))
            if not math.isfinite(val):
                raise DomainError(f"{name} must be finite")
            object.__setattr__(self, name, val)
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta}")
        check_hurst(self.H, above_half=True)

    @property
    def mean_level(self) -> float:
        return self.alpha / self.beta
