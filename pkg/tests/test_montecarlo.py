import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from scipy.stats import kstest

from subfvas import inference, montecarlo
from subfvas.errors import ArgumentError, ConfigError, ExperimentError, NonIdentifiableError
from subfvas.grid import VasicekParams
from subfvas.montecarlo import ExperimentConfig, ks_statistic, resolve_threads, run_experiment

SCHEMA = json.loads((Path(__file__).parents[1] / "docs/schemas/experiment_report.schema.json").read_text())
P = VasicekParams(1.0, 0.5, 0.2, 0.7)


def small(**kw):
    base = dict(params=P, horizons=(4.0, 8.0), n_per_unit=16, replications=60, master_seed=5)
    base.update(kw)
    return ExperimentConfig(**base)


class TestKS:
    def test_matches_scipy(self):
        x = np.random.default_rng(0).normal(size=300)
        assert ks_statistic(x) == pytest.approx(kstest(x, "norm").statistic, abs=1e-12)

    def test_hand_example(self):
        # all mass at 0: F_n jumps 0 -> 1 where Phi = 1/2
        assert ks_statistic(np.zeros(50)) == pytest.approx(0.5, abs=1e-15)

    def test_validation(self):
        with pytest.raises(ArgumentError):
            ks_statistic(np.zeros(49))
        x = np.zeros(60)
        x[3] = np.nan
        with pytest.raises(ArgumentError):
            ks_statistic(x)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        dict(horizons=()), dict(horizons=(4.0, 2.0)), dict(horizons=(-1.0,)), dict(n_per_unit=8),
        dict(horizons=(4.1,), n_per_unit=16), dict(replications=0), dict(master_seed=-1),
        dict(mode="gamma"), dict(construction="fft"), dict(method="milstein"),
        dict(mode="beta_star", zero_noise=True)])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            small(**kw)

    def test_zero_noise_drops_beta_star(self):
        assert "beta_star" not in small(zero_noise=True).estimators
        assert small().estimators == ("alpha", "beta", "joint_alpha", "joint_beta", "beta_star")

    def test_threads(self, monkeypatch):
        monkeypatch.delenv("SUBFVAS_THREADS", raising=False)
        assert resolve_threads() == 1
        monkeypatch.setenv("SUBFVAS_THREADS", "3")
        assert resolve_threads() == 3
        assert resolve_threads(2) == 2
        with pytest.raises(ArgumentError):
            resolve_threads(0)


class TestRun:
    def test_zero_noise_exact(self):
        rep = run_experiment(small(zero_noise=True, method="euler", replications=50))
        for row in rep.results:
            truth = 1.0 if "alpha" in row["estimator"] else 0.5
            assert abs(row["mean_estimate"] - truth) <= 1e-8
            assert row["sd"] <= 1e-10

    def test_schema_and_determinism(self):
        a = run_experiment(small()).to_json()
        b = run_experiment(small()).to_json()
        assert a == b
        doc = json.loads(a)
        jsonschema.validate(doc, SCHEMA)
        assert [r["horizon"] for r in doc["results"]] == [4.0] * 5 + [8.0] * 5

    def test_thread_invariance(self, monkeypatch):
        ref = run_experiment(small(construction="kernel"), threads=1).to_json()
        assert run_experiment(small(construction="kernel"), threads=4).to_json() == ref
        monkeypatch.setenv("SUBFVAS_THREADS", "3")
        assert run_experiment(small(construction="kernel")).to_json() == ref

    def test_replication_order_independent(self):
        cfg = small(replications=5)
        one = montecarlo.run_replication(cfg, 1, 3)
        assert montecarlo.run_replication(cfg, 1, 3) == one
        assert montecarlo.run_replication(cfg, 0, 3) != one

    def test_row_statistics(self):
        rep = run_experiment(small(mode="alpha", replications=80))
        row = rep.row(8.0, "alpha")
        est = [montecarlo.run_replication(rep_cfg := small(mode="alpha", replications=80), 1, r)["alpha"]["estimate"]
               for r in range(80)]
        est = np.array(est)
        assert row["mean_estimate"] == pytest.approx(est.mean(), rel=1e-14)
        assert row["sd"] == pytest.approx(est.std(ddof=1), rel=1e-12)
        assert row["rmse"] == pytest.approx(np.sqrt(np.mean((est - 1.0) ** 2)), rel=1e-12)
        assert row["ks_statistic"] is not None
        with pytest.raises(KeyError):
            rep.row(8.0, "beta")

    def test_failures_counted_within_budget(self, monkeypatch):
        real = inference.mle_beta
        calls = {"n": 0}

        def sometimes(alpha, tp):
            calls["n"] += 1
            if calls["n"] % 10 == 0:
                raise NonIdentifiableError("forced")
            return real(alpha, tp)

        monkeypatch.setattr(montecarlo, "mle_beta", sometimes)
        rep = run_experiment(small(mode="beta", horizons=(4.0,)))
        row = rep.row(4.0, "beta")
        assert row["replications_failed"] == {"count": 6, "by_kind": {"NON_IDENTIFIABLE": 6}}
        assert row["successes"] == 54 and len(rep.failures) == 6
        jsonschema.validate(json.loads(rep.to_json()), SCHEMA)

    def test_budget_exceeded(self, monkeypatch):
        def never(alpha, tp):
            raise NonIdentifiableError("forced")

        monkeypatch.setattr(montecarlo, "mle_beta", never)
        with pytest.raises(ExperimentError) as ei:
            run_experiment(small(mode="beta", horizons=(4.0,), replications=5))
        assert ei.value.exit_code == 5
        assert ei.value.report.row(4.0, "beta")["mean_estimate"] is None


class TestSpecExamples:
    def test_ks_quantile_grid(self):
        from scipy.stats import norm
        n = 1000
        assert ks_statistic(norm.ppf((np.arange(1, n + 1) - 0.5) / n)) <= 1e-3

    def test_ks_location_shift(self):
        x = np.random.default_rng(1).normal(size=500) + 3.0
        assert ks_statistic(x) >= 0.4

    def test_information_grows(self):
        rep = run_experiment(small(mode="beta", horizons=(4.0, 8.0, 16.0)))
        med = [rep.row(T, "beta")["median_i_pp"] for T in (4.0, 8.0, 16.0)]
        assert med[0] < med[1] < med[2]

    def test_small_sample_has_no_ks(self):
        rep = run_experiment(small(mode="alpha", replications=20))
        assert rep.row(4.0, "alpha")["ks_statistic"] is None
