"""Batch command line: simulate, estimate, experiment, check-kernels.

Exit codes: 0 ok, 2 config/argument error, 3 numerical failure,
4 non-identifiable data, 5 experiment failure budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checks import format_table, run_checks
from .errors import ArgumentError, ConfigError, ExperimentError, SubfvasError
from .grid import ProcessLabel, SamplePath
from .inference import mle_alpha, mle_beta, mle_beta_star, mle_joint
from .io import RunConfig, grid_for, load_config, read_path, write_path
from .montecarlo import ExperimentConfig, run_experiment
from .simulate import (
    Construction,
    deterministic_part,
    drive_vasicek,
    simulate_subfbm_cholesky,
    simulate_subfbm_kernel,
)
from .transform import transform_path

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_NONID, EXIT_BUDGET = 0, 2, 3, 4, 5
ESTIMATE_MODES = ("alpha", "beta", "joint", "beta_star")


def simulate_from_config(cfg: RunConfig) -> tuple[SamplePath, SamplePath]:
    """(X, zeta) exactly as `subfvas simulate` produces them."""
    cfg.need("seed")
    p = cfg.params()
    grid = grid_for(cfg)
    if Construction(cfg.get("construction", "cholesky")) is Construction.KERNEL:
        zeta = simulate_subfbm_kernel(grid, p.H, cfg["seed"])[1]
    else:
        zeta = simulate_subfbm_cholesky(grid, p.H, cfg["seed"])
    x = drive_vasicek(grid, p.alpha, p.beta, p.x0, zeta.values, cfg.get("method", "exact"))
    return SamplePath(grid, x, ProcessLabel.X, initial=p.x0), zeta


def estimate_from_path(x: SamplePath, mode: str, cfg: RunConfig):
    if mode not in ESTIMATE_MODES:
        raise ArgumentError(f"unknown mode {mode!r}")
    cfg.need("H")
    H = cfg["H"]
    if mode == "alpha":
        if "beta" not in cfg:
            raise ConfigError(f"{cfg.source}: mode alpha needs the known 'beta' in the config")
        return mle_alpha(cfg["beta"], transform_path(x, H))
    if mode == "beta":
        if "alpha" not in cfg:
            raise ConfigError(f"{cfg.source}: mode beta needs the known 'alpha' in the config")
        return mle_beta(cfg["alpha"], transform_path(x, H))
    if mode == "joint":
        return mle_joint(transform_path(x, H))
    # beta_star needs the truth to split off the deterministic part
    cfg.need("alpha", "beta", "x0")
    u = x.values - deterministic_part(x.grid, cfg["alpha"], cfg["beta"], cfg["x0"],
                                      cfg.get("method", "exact"))
    u[0] = 0.0
    return mle_beta_star(SamplePath(x.grid, u, ProcessLabel.U), H)


def experiment_from_config(cfg: RunConfig, zero_noise: bool = False) -> ExperimentConfig:
    cfg.need("n_per_unit", "replications", "seed")
    return ExperimentConfig(
        params=cfg.params(), horizons=tuple(cfg.horizons()), n_per_unit=cfg["n_per_unit"],
        replications=cfg["replications"], master_seed=cfg["seed"], mode=cfg.get("mode", "all"),
        construction=cfg.get("construction", "cholesky"), method=cfg.get("method", "exact"),
        zero_noise=zero_noise,
    )


def noise_path_name(out: str) -> str:
    p = Path(out)
    stem = p.name[:-4] if p.name.endswith(".csv") else p.name
    return str(p.with_name(stem + ".zeta.csv"))


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    x, zeta = simulate_from_config(cfg)
    write_path(x, args.out)
    if args.emit_noise:
        write_path(zeta, noise_path_name(args.out))
    return EXIT_OK


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    x = read_path(args.path, ProcessLabel.X)
    rep = estimate_from_path(x, args.mode, cfg)
    sys.stdout.write(json.dumps(rep.to_dict(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    ecfg = experiment_from_config(cfg, args.zero_noise)
    try:
        report = run_experiment(ecfg, threads=args.threads)
    except ExperimentError as exc:
        if exc.report is not None:
            Path(args.out).write_text(exc.report.to_json())
        raise
    Path(args.out).write_text(report.to_json())
    return EXIT_OK


def cmd_check_kernels(args) -> int:
    results = run_checks(lambda_scale=args.perturb_lambda)
    print(format_table(results))
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed", file=sys.stderr)
        return 1
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="subfvas",
        description="Sub-fractional Vasicek simulation and drift estimation.",
        epilog="Exit codes: 0 ok, 2 config error, 3 numerical error, "
               "4 non-identifiable data, 5 experiment failure budget exceeded.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="simulate one Vasicek path to CSV")
    s.add_argument("--config", required=True, help="JSON config (H, alpha, beta, x0, T, n_per_unit, seed)")
    s.add_argument("--out", required=True, help="output CSV for the X path")
    s.add_argument("--emit-noise", action="store_true",
                   help="also write the driving noise path to <out>.zeta.csv")
    s.set_defaults(func=cmd_simulate)

    e = sub.add_parser("estimate", help="estimate drift parameters from a path CSV")
    e.add_argument("--path", required=True, help="CSV with header t,value")
    e.add_argument("--mode", required=True, choices=ESTIMATE_MODES,
                   help="alpha (beta known), beta (alpha known), joint, beta_star (validation only)")
    e.add_argument("--config", required=True, help="JSON config holding H and any known parameters")
    e.set_defaults(func=cmd_estimate)

    x = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    x.add_argument("--config", required=True, help="JSON experiment config")
    x.add_argument("--out", required=True, help="output JSON report")
    x.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: $SUBFVAS_THREADS or 1); results do not depend on it")
    x.add_argument("--zero-noise", action="store_true",
                   help="replace the noise by 0 (exact-recovery smoke test; skips beta_star)")
    x.set_defaults(func=cmd_experiment)

    k = sub.add_parser("check-kernels", help="run the kernel and covariance self-checks")
    k.add_argument("--perturb-lambda", type=float, default=1.0, metavar="FACTOR",
                   help="self-test hook: multiply lambda_H by FACTOR before checking (default 1)")
    k.set_defaults(func=cmd_check_kernels)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SubfvasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
