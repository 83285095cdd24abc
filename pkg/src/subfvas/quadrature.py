"""Composite Gauss-Legendre rules, with an endpoint-singularity substitution.

A factor (x - a)^p near the left endpoint is removed by u = (x - a)^(p+1):

    int_a^b (x-a)^p g(x) dx = 1/(p+1) int_0^{(b-a)^(p+1)} g(a + u^(1/(p+1))) du

For p > -1/2 the map x - a = u^(1/(p+1)) is not smooth enough at u = 0, so
the substitution is taken as u = (x - a)^((p+1)/k) with the smallest integer
k >= 2(p+1); the Jacobian then carries a polynomial factor u^(k-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable
import math

import numpy as np

from .errors import DomainError


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class QuadratureSpec:
    panels: int = 64
    nodes_per_panel: int = 16
    singularity_exponent: float = 0.0

    def __post_init__(self):
        if int(self.panels) != self.panels or self.panels < 1:
            raise DomainError(f"panels must be a positive integer, got {self.panels}")
        if int(self.nodes_per_panel) != self.nodes_per_panel or self.nodes_per_panel < 2:
            raise DomainError(f"nodes_per_panel must be >= 2, got {self.nodes_per_panel}")
        if not self.singularity_exponent > -1.0:
            raise DomainError(
                f"singularity_exponent must exceed -1, got {self.singularity_exponent}"
            )

    def refined(self, factor: int) -> "QuadratureSpec":
        return QuadratureSpec(self.panels * factor, self.nodes_per_panel, self.singularity_exponent)


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=64)
def _unit_rule(panels: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on [0, 1]."""
    x, w = gauss_legendre(nodes)
    h = 1.0 / panels
    left = np.arange(panels) * h
    pts = (left[:, None] + 0.5 * h * (x[None, :] + 1.0)).ravel()
    wts = np.tile(0.5 * h * w, panels)
    pts.setflags(write=False)
    wts.setflags(write=False)
    return pts, wts


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Composite GL of a smooth f over [a, b]."""
    if b == a:
        return 0.0
    u, wu = _unit_rule(spec.panels, spec.nodes_per_panel)
    x = a + (b - a) * u
    return float((b - a) * np.dot(wu, f(x)))


def integrate_singular(g: Callable[[np.ndarray], np.ndarray], a: float, b: float, p: float,
                       spec: QuadratureSpec = DEFAULT_SPEC, lo: float = 0.0,
                       side: str = "left") -> float:
    """int (x - a)^p g(x - a) dx over [a + lo, b].

    g receives the distance d = x - a to the singular endpoint, which keeps
    expressions like (x^2 - a^2)/(x - a) free of cancellation. With
    side="right" the singular point is b, the factor is (b - x)^p and g
    receives d = b - x; the range is then [a, b - lo].
    """
    if not p > -1.0:
        raise DomainError(f"non-integrable endpoint exponent {p}")
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    q = p + 1.0
    span = b - a
    if span <= lo:
        return 0.0
    k, m = _grading(q)
    u0 = lo ** (1.0 / m)
    u1 = span ** (1.0 / m)
    u, wu = _unit_rule(spec.panels, spec.nodes_per_panel)
    uu = u0 + (u1 - u0) * u
    jac = uu ** (k - 1) if k > 1 else 1.0
    return float((u1 - u0) * m * np.dot(wu, jac * g(uu**m)))


def _grading(q: float) -> tuple[int, float]:
    """Exponents for d = u^m with m q = k: the weight d^(q-1) dd becomes m u^(k-1) du."""
    k = max(1, math.ceil(2.0 * q))
    return k, k / q


def integrate_singular_graded(g: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                              p: float, scale: float,
                              spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """integrate_singular over [a, b] split at distances scale*4^k from a.

    For integrands that vary on a length scale much shorter than b - a next
    to the singular endpoint.
    """
    span = b - a
    edges = [0.0]
    step = scale
    while step < span:
        edges.append(step)
        step *= 4.0
    edges.append(span)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        total += integrate_singular(g, a, a + hi, p, spec, lo=lo)
    return total


def tail_integral(a: np.ndarray, p: float, e: float, panels: int = 4,
                  nodes: int = 16) -> np.ndarray:
    """Vectorized int_a^1 v^p (1 - v)^e dv for a in [0, 1] and e > -1.

    Used for bulk kernel tables where millions of evaluations are needed.
    For a >= 1/2 the factor (1-v)^e is absorbed by 1 - v = (1-a) tau^m with
    m (e+1) a small integer k, leaving the smooth integrand k tau^(k-1) v^p / (e+1).
    For a < 1/2 the piece over [a, 1/2] uses v = a (2a)^(-tau), which turns
    the v^p factor into a smooth exponential in tau. a = 0 needs p > -1.
    """
    a = np.asarray(a, dtype=float)
    if not e > -1.0:
        raise DomainError(f"non-integrable exponent {e} at v = 1")
    u, wu = _unit_rule(panels, nodes)
    q = e + 1.0
    k, m = _grading(q)
    out = np.empty_like(a)

    def upper(av):
        # int_av^1 with av >= 1/2
        span = 1.0 - av
        v = 1.0 - span[:, None] * u[None, :] ** m
        return span ** q * m * np.sum(v ** p * (wu * u ** (k - 1)), axis=1)

    hi = a >= 0.5
    if hi.any():
        out[hi] = upper(a[hi])
    lo_mask = ~hi
    if lo_mask.any():
        half = upper(np.array([0.5]))[0]
        al = a[lo_mask]
        res = np.empty_like(al)
        pos = al > 0.0
        if pos.any():
            ap = al[pos]
            L = np.log(0.5 / ap)
            # the exponential integrand varies on a log scale of ~1/|p+1|; use
            # about one panel per 3 units of log range, chosen per element so
            # a value never depends on the rest of the batch
            need = np.maximum(panels, np.ceil(L * max(1.0, abs(p + 1.0)) / 3.0)).astype(int)
            vals = np.empty_like(ap)
            for npan in np.unique(need):
                sel = need == npan
                ul, wl = _unit_rule(int(npan), nodes)
                v = ap[sel, None] * np.exp(L[sel, None] * ul[None, :])
                vals[sel] = L[sel] * np.sum(v ** (p + 1.0) * (1.0 - v) ** e * wl, axis=1)
            res[pos] = vals
        if (~pos).any():
            if not p > -1.0:
                raise DomainError(f"tail integral from 0 diverges for p = {p}")
            r = p + 1.0
            k0, m0 = _grading(r)
            v = 0.5 * u ** m0
            res[~pos] = 0.5 ** r * m0 * np.dot(wu * u ** (k0 - 1), (1.0 - v) ** e)
        out[lo_mask] = half + res
    return out
