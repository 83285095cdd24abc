"""Log-likelihood and closed-form drift MLEs.

All integrals run over cells i >= burn_in of the transformed path:

    z_T  = z_n - z_b          w_T  = w_n - w_b
    i_p  = sum P dw           i_pp = sum P^2 dw        i_pz = sum P dz
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ArgumentError, DegenerateHorizonError, NonIdentifiableError
from .grid import ProcessLabel, SamplePath
from .transform import TransformedPath, cell_integral, k_weights, w_grid, _cell_derivative, _z_from

CS_THRESHOLD = 1e-10
IPP_THRESHOLD = 1e-10


class Mode(str, enum.Enum):
    ALPHA_KNOWN_BETA = "ALPHA_KNOWN_BETA"
    BETA_KNOWN_ALPHA = "BETA_KNOWN_ALPHA"
    JOINT = "JOINT"
    BETA_STAR = "BETA_STAR"


@dataclass(frozen=True)
class Integrals:
    z_T: float
    w_T: float
    i_p: float
    i_pp: float
    i_pz: float
    p_max2: float

    @property
    def cs_gap(self) -> float:
        return self.w_T * self.i_pp - self.i_p**2


@dataclass(frozen=True)
class EstimateReport:
    """std_alpha and std_beta are the factors that standardize the error:
    std_alpha*(alpha_hat - alpha) and std_beta*(beta_hat - beta) are
    asymptotically N(0, 1)."""

    mode: Mode
    alpha_hat: float | None
    beta_hat: float | None
    w_T: float
    i_pp: float
    i_p: float
    z_T: float
    i_pz: float
    std_alpha: float | None
    std_beta: float | None
    T: float
    H: float
    burn_in: int
    c_hat: float | None = None
    operational: bool = True

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d


def integrals(tp: TransformedPath, p: np.ndarray | None = None,
              z: np.ndarray | None = None) -> Integrals:
    b = tp.burn_in
    p = tp.pH if p is None else p
    z = tp.z if z is None else z
    w = tp.w
    return Integrals(
        z_T=float(z[-1] - z[b]),
        w_T=float(w[-1] - w[b]),
        i_p=cell_integral(p, w, b),
        i_pp=cell_integral(p * p, w, b),
        i_pz=cell_integral(p, z, b),
        p_max2=float(np.max(p[b:-1] ** 2)) if p.size > b + 1 else 0.0,
    )


def log_likelihood(theta, tp: TransformedPath) -> float:
    alpha, beta = (float(v) for v in theta)
    I = integrals(tp)
    return (alpha * I.z_T - beta * I.i_pz - 0.5 * alpha**2 * I.w_T
            + alpha * beta * I.i_p - 0.5 * beta**2 * I.i_pp)


def _report(mode, tp, I, alpha_hat, beta_hat, std_alpha, std_beta, **extra):
    return EstimateReport(mode=mode, alpha_hat=alpha_hat, beta_hat=beta_hat, w_T=I.w_T,
                          i_pp=I.i_pp, i_p=I.i_p, z_T=I.z_T, i_pz=I.i_pz,
                          std_alpha=std_alpha, std_beta=std_beta, T=tp.grid.T, H=tp.H,
                          burn_in=tp.burn_in, **extra)


def _check_ipp(I: Integrals, what: str = "P_H"):
    if not (I.p_max2 > 0 and I.i_pp > IPP_THRESHOLD * I.w_T * I.p_max2):
        raise NonIdentifiableError(
            f"int {what}^2 dw = {I.i_pp:.3e} carries no information about beta"
        )


def mle_alpha(beta_known: float, tp: TransformedPath) -> EstimateReport:
    """alpha_hat = (Z_T + beta int P dw)/w_T."""
    if beta_known < 0:
        raise ArgumentError(f"known beta must be >= 0, got {beta_known}")
    I = integrals(tp)
    if not I.w_T > 0:
        raise DegenerateHorizonError("w_T = 0: horizon carries no information")
    a = (I.z_T + beta_known * I.i_p) / I.w_T
    return _report(Mode.ALPHA_KNOWN_BETA, tp, I, a, None, math.sqrt(I.w_T), None)


def mle_beta(alpha_known: float, tp: TransformedPath) -> EstimateReport:
    """beta_hat = (alpha int P dw - int P dZ)/int P^2 dw."""
    I = integrals(tp)
    _check_ipp(I)
    b = (alpha_known * I.i_p - I.i_pz) / I.i_pp
    return _report(Mode.BETA_KNOWN_ALPHA, tp, I, None, b, None, math.sqrt(I.i_pp))


def mle_joint(tp: TransformedPath, threshold: float = CS_THRESHOLD) -> EstimateReport:
    """Both drift parameters from the two linear score equations."""
    I = integrals(tp)
    gap = I.cs_gap
    if not gap > threshold * I.w_T * I.i_pp:
        raise NonIdentifiableError(
            f"Cauchy-Schwarz gap w_T*i_pp - i_p^2 = {gap:.3e} is below "
            f"{threshold:g} * w_T * i_pp"
        )
    den = I.i_p**2 - I.w_T * I.i_pp
    a = (I.i_pz * I.i_p - I.z_T * I.i_pp) / den
    b = (I.w_T * I.i_pz - I.z_T * I.i_p) / den
    return _report(Mode.JOINT, tp, I, a, b, None, None)


def joint_error_representation(tp: TransformedPath, m) -> tuple[float, float]:
    """(alpha_tilde - alpha, beta_tilde - beta) written through the martingale M."""
    m = m.values if isinstance(m, SamplePath) else np.asarray(m, dtype=float)
    I = integrals(tp)
    b = tp.burn_in
    m_T = float(m[-1] - m[b])
    i_pm = cell_integral(tp.pH, m, b)
    den = I.i_p**2 - I.w_T * I.i_pp
    return ((i_pm * I.i_p - m_T * I.i_pp) / den, (I.w_T * i_pm - m_T * I.i_p) / den)


def alpha_error_representation(tp: TransformedPath, m) -> float:
    m = m.values if isinstance(m, SamplePath) else np.asarray(m, dtype=float)
    b = tp.burn_in
    return float(m[-1] - m[b]) / float(tp.w[-1] - tp.w[b])


def beta_error_representation(tp: TransformedPath, m, p=None) -> float:
    """beta_hat - beta = -int P dM / int P^2 dw."""
    m = m.values if isinstance(m, SamplePath) else np.asarray(m, dtype=float)
    p = tp.pH if p is None else p
    b = tp.burn_in
    return -cell_integral(p, m, b) / cell_integral(p * p, tp.w, b)


def beta_star_transform(u: SamplePath, H: float) -> TransformedPath:
    """z and P-tilde of an OU path (stored in the z and pH slots)."""
    if u.label not in (ProcessLabel.U, ProcessLabel.X):
        raise ArgumentError(f"beta-star needs an OU path, got {u.label.value}")
    W = k_weights(u.grid, H)
    w = w_grid(u.grid, H)
    z = _z_from(W, u.values, u.grid.dt)
    pt = _cell_derivative(W, u.values, w)
    return TransformedPath(u.grid, H, z, w, pt, pTilde=pt)


def mle_beta_star(u: SamplePath | TransformedPath, H: float | None = None) -> EstimateReport:
    """beta* = -int P~ dZ^U / int P~^2 dw from the OU component U.

    Building U needs the true alpha, beta and x0, so this is a validation
    estimator (operational=False). An X-labelled path is read as an OU path
    started at x0.
    """
    if isinstance(u, SamplePath):
        if H is None:
            raise ArgumentError("H is required with a path argument")
        tp = beta_star_transform(u, H)
    else:
        tp = u
    I = integrals(tp)
    _check_ipp(I, "P-tilde")
    b = -I.i_pz / I.i_pp
    return _report(Mode.BETA_STAR, tp, I, None, b, None, math.sqrt(I.i_pp),
                   c_hat=I.i_pp / tp.grid.T, operational=False)
