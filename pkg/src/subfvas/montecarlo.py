"""Replication harness: simulate -> transform -> estimate over seeds and horizons."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError, ConfigError, ExperimentError, NonIdentifiableError, NumericalError
from .grid import ProcessLabel, SamplePath, TimeGrid, VasicekParams
from .inference import mle_alpha, mle_beta, mle_beta_star, mle_joint
from .kernels import hurst_constants
from .simulate import (
    Construction,
    Method,
    deterministic_part,
    drive_vasicek,
    simulate_subfbm_cholesky,
    simulate_subfbm_kernel,
    split_seed,
)
from .special import norm_cdf
from .transform import transform_path

MODES = {
    "alpha": ("alpha",),
    "beta": ("beta",),
    "joint": ("joint_alpha", "joint_beta"),
    "beta_star": ("beta_star",),
    "all": ("alpha", "beta", "joint_alpha", "joint_beta", "beta_star"),
}
FAILURE_BUDGET = 0.2
MIN_KS_SAMPLE = 50
THREADS_ENV = "SUBFVAS_THREADS"


def ks_statistic(sample) -> float:
    """sup_x |F_n(x) - Phi(x)| for the standard normal Phi."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n < MIN_KS_SAMPLE:
        raise ArgumentError(f"KS statistic needs at least {MIN_KS_SAMPLE} values, got {n}")
    if not np.all(np.isfinite(x)):
        raise ArgumentError("sample contains non-finite values")
    cdf = norm_cdf(x)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


@dataclass(frozen=True)
class ExperimentConfig:
    params: VasicekParams
    horizons: tuple
    n_per_unit: int
    replications: int
    master_seed: int
    mode: str = "all"
    construction: str = "cholesky"
    method: str = "exact"
    zero_noise: bool = False

    def __post_init__(self):
        hs = tuple(float(h) for h in self.horizons)
        if not hs or any(not (math.isfinite(h) and h > 0) for h in hs):
            raise ConfigError("horizons must be positive")
        if any(b <= a for a, b in zip(hs, hs[1:])):
            raise ConfigError("horizons must be strictly increasing")
        object.__setattr__(self, "horizons", hs)
        if int(self.n_per_unit) != self.n_per_unit or self.n_per_unit < 16:
            raise ConfigError(f"n_per_unit must be an integer >= 16, got {self.n_per_unit}")
        for h in hs:
            steps = h * self.n_per_unit
            if abs(steps - round(steps)) > 1e-9 * steps:
                raise ConfigError(f"n_per_unit * T must be an integer, got {steps} for T = {h}")
        if int(self.replications) != self.replications or self.replications < 1:
            raise ConfigError(f"replications must be a positive integer, got {self.replications}")
        if not (0 <= int(self.master_seed) < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {sorted(MODES)}, got {self.mode!r}")
        try:
            Construction(self.construction)
            Method(self.method)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.zero_noise and self.mode == "beta_star":
            raise ConfigError("beta_star is undefined without noise (U is identically 0)")

    def steps(self, T: float) -> int:
        return int(round(T * self.n_per_unit))

    @property
    def estimators(self) -> tuple:
        names = MODES[self.mode]
        if self.zero_noise:
            names = tuple(n for n in names if n != "beta_star")
        return names

    def to_dict(self) -> dict:
        p = self.params
        return {
            "H": p.H, "alpha": p.alpha, "beta": p.beta, "x0": p.x0,
            "horizons": list(self.horizons), "n_per_unit": int(self.n_per_unit),
            "replications": int(self.replications), "seed": int(self.master_seed),
            "mode": self.mode, "construction": self.construction, "method": self.method,
            "zero_noise": bool(self.zero_noise),
        }


@dataclass
class ExperimentReport:
    config: dict
    results: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"config": self.config, "results": self.results, "failures": self.failures}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2, allow_nan=False) + "\n"

    def row(self, horizon: float, estimator: str) -> dict:
        for r in self.results:
            if r["horizon"] == horizon and r["estimator"] == estimator:
                return r
        raise KeyError((horizon, estimator))


def _classify(exc: Exception) -> str:
    if isinstance(exc, NonIdentifiableError):
        return "NON_IDENTIFIABLE"
    if isinstance(exc, NumericalError):
        return "FACTORIZATION"
    return "NUMERIC"


_CAUGHT = (NonIdentifiableError, NumericalError, ArithmeticError, ValueError, np.linalg.LinAlgError)


def run_replication(cfg: ExperimentConfig, h_index: int, r: int) -> dict:
    """One replication at one horizon. Returns {estimator: record or failure}."""
    p = cfg.params
    T = cfg.horizons[h_index]
    grid = TimeGrid(T, cfg.steps(T))
    seed = split_seed(cfg.master_seed, r, h_index)
    names = cfg.estimators
    try:
        if cfg.zero_noise:
            zeta = np.zeros(grid.n + 1)
        elif Construction(cfg.construction) is Construction.KERNEL:
            zeta = simulate_subfbm_kernel(grid, p.H, seed)[1].values
        else:
            zeta = simulate_subfbm_cholesky(grid, p.H, seed).values
        xv = drive_vasicek(grid, p.alpha, p.beta, p.x0, zeta, cfg.method)
        tp = transform_path(SamplePath(grid, xv, ProcessLabel.X, initial=p.x0), p.H)
    except _CAUGHT as exc:
        fail = {"failure": _classify(exc), "reason": str(exc)}
        return {n: fail for n in names}

    out = {}
    for name in names:
        try:
            if name == "alpha":
                rep = mle_alpha(p.beta, tp)
                out[name] = {"estimate": rep.alpha_hat, "std": rep.std_alpha * (rep.alpha_hat - p.alpha),
                             "i_pp": rep.i_pp}
            elif name == "beta":
                rep = mle_beta(p.alpha, tp)
                out[name] = {"estimate": rep.beta_hat, "std": rep.std_beta * (rep.beta_hat - p.beta),
                             "i_pp": rep.i_pp}
            elif name in ("joint_alpha", "joint_beta"):
                rep = mle_joint(tp)
                est = rep.alpha_hat if name == "joint_alpha" else rep.beta_hat
                out[name] = {"estimate": est, "std": None, "i_pp": rep.i_pp}
            elif name == "beta_star":
                uv = xv - deterministic_part(grid, p.alpha, p.beta, p.x0, cfg.method)
                uv[0] = 0.0
                rep = mle_beta_star(SamplePath(grid, uv, ProcessLabel.U), p.H)
                out[name] = {"estimate": rep.beta_hat, "std": rep.std_beta * (rep.beta_hat - p.beta),
                             "i_pp": rep.i_pp, "c_hat": rep.c_hat}
        except _CAUGHT as exc:
            out[name] = {"failure": _classify(exc), "reason": str(exc)}
    return out


def _truth(cfg: ExperimentConfig, name: str) -> float:
    return cfg.params.alpha if "alpha" in name else cfg.params.beta


def _f(x):
    return None if x is None or not math.isfinite(x) else float(x)


def _aggregate(cfg: ExperimentConfig, T: float, name: str, recs: list) -> dict:
    ok = [r for r in recs if "failure" not in r]
    kinds: dict[str, int] = {}
    for r in recs:
        if "failure" in r:
            kinds[r["failure"]] = kinds.get(r["failure"], 0) + 1
    row = {
        "horizon": T, "estimator": name, "replications": len(recs), "successes": len(ok),
        "replications_failed": {"count": len(recs) - len(ok), "by_kind": kinds},
        "mean_estimate": None, "bias": None, "sd": None, "mc_standard_error": None,
        "rmse": None, "var_ratio": None, "ks_statistic": None, "c_hat": None,
        "second_moment_ratio": None, "median_i_pp": None,
    }
    if not ok:
        return row
    truth = _truth(cfg, name)
    est = np.array([r["estimate"] for r in ok])
    k = est.size
    mean = float(np.mean(est))
    sd = float(np.std(est, ddof=1)) if k > 1 else 0.0
    row.update(mean_estimate=mean, bias=mean - truth, sd=sd, mc_standard_error=sd / math.sqrt(k),
               rmse=float(np.sqrt(np.mean((est - truth) ** 2))),
               median_i_pp=float(np.median([r["i_pp"] for r in ok])))
    H = cfg.params.H
    if name in ("alpha", "joint_alpha") and k > 1:
        lam = hurst_constants(H).lambdaH
        row["var_ratio"] = sd**2 / (T ** (2.0 * H - 2.0) / lam)
    std = [r["std"] for r in ok if r.get("std") is not None]
    if len(std) >= MIN_KS_SAMPLE and len(std) == k:
        row["ks_statistic"] = ks_statistic(std)
    if name == "beta_star":
        c_hat = float(np.mean([r["c_hat"] for r in ok]))
        row["c_hat"] = c_hat
        row["second_moment_ratio"] = float(np.mean(T * (est - truth) ** 2)) * c_hat
    return {key: (_f(v) if isinstance(v, float) else v) for key, v in row.items()}


def resolve_threads(threads: int | None = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else 1
    if threads < 1:
        raise ArgumentError(f"thread count must be positive, got {threads}")
    return threads


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> ExperimentReport:
    """Runs every (horizon, replication) and folds results in index order."""
    threads = resolve_threads(threads)
    report = ExperimentReport(config=cfg.to_dict())
    worst = 0.0
    for h, T in enumerate(cfg.horizons):
        jobs = range(cfg.replications)
        if threads == 1:
            recs = [run_replication(cfg, h, r) for r in jobs]
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                recs = list(pool.map(lambda r: run_replication(cfg, h, r), jobs))
        for name in cfg.estimators:
            col = [rec[name] for rec in recs]
            row = _aggregate(cfg, T, name, col)
            report.results.append(row)
            worst = max(worst, row["replications_failed"]["count"] / cfg.replications)
            for r, rec in enumerate(col):
                if "failure" in rec:
                    report.failures.append({"horizon": T, "estimator": name, "replication": r,
                                            "kind": rec["failure"], "reason": rec["reason"]})
    if worst > FAILURE_BUDGET:
        raise ExperimentError(
            f"failure fraction {worst:.0%} exceeds the {FAILURE_BUDGET:.0%} budget", report
        )
    return report
