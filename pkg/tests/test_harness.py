import json

import numpy as np
import pytest

import mimosec.harness as harness
from mimosec.cli import main
from mimosec.errors import ConfigurationError, SingularMatrixError
from mimosec.harness import (SweepConfig, SweepRecord, emit_results,
                             load_config, read_records, run_sweep)


class TestSweepConfig:
    def test_defaults_valid(self):
        SweepConfig().validate()

    def test_antenna_budget(self):
        with pytest.raises(ConfigurationError):
            SweepConfig(dims=(3, 1, 4, 2, 2)).validate()

    def test_unknown_algorithm(self):
        with pytest.raises(ConfigurationError):
            SweepConfig(algorithms=("DPC",)).validate()

    def test_unknown_scenario(self):
        with pytest.raises(ConfigurationError):
            SweepConfig(scenario="oracle_csi").validate()

    def test_load_config_roundtrip(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({
            "scenario": "perfect_csi", "algorithms": ["ZF"], "snr_db": [5, 10],
            "trials": 3, "dims": [2, 1, 4, 2, 2], "m": 0.5, "seed": 11}))
        cfg = load_config(str(path))
        assert cfg.snr_db == (5.0, 10.0) and cfg.seed == 11

    def test_load_config_unknown_field(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"snr": [5]}))
        with pytest.raises(ConfigurationError):
            load_config(str(path))


class TestRunSweep:
    def test_deterministic_records(self):
        cfg = SweepConfig(algorithms=("ZF",), snr_db=(8.0,), trials=3, seed=2)
        r1 = run_sweep(cfg, metric="ber")
        r2 = run_sweep(cfg, metric="ber")
        assert r1 == r2

    def test_thread_count_invariance(self):
        cfg = SweepConfig(algorithms=("ZF", "SO-THP+S-GMI"), snr_db=(6.0,),
                          trials=8, seed=3)
        sequential = run_sweep(cfg, metric="ber", threads=1)
        threaded = run_sweep(cfg, metric="ber", threads=4)
        assert sequential == threaded

    def test_noiseless_sentinel_zero_ber(self):
        cfg = SweepConfig(algorithms=("SO-THP+S-GMI",), snr_db=(float("inf"),),
                          trials=2, seed=4, n_symbols=128)
        recs = run_sweep(cfg, metric="ber")
        assert recs[0].value == 0.0

    def test_imperfect_csi_with_zero_variance_matches_perfect(self):
        base = dict(algorithms=("SO-THP+S-GMI",), snr_db=(10.0,), trials=4, seed=5)
        perfect = run_sweep(SweepConfig(scenario="perfect_csi", **base),
                            metric="secrecy_rate")
        imperfect = run_sweep(SweepConfig(scenario="imperfect_csi", sigma_e2=0.0,
                                          **base), metric="secrecy_rate")
        assert perfect[0].value == imperfect[0].value

    def test_values_non_negative(self):
        cfg = SweepConfig(algorithms=("ZF", "SO-THP"), snr_db=(0.0, 10.0),
                          trials=3, seed=6, n_symbols=64)
        for metric in ("ber", "secrecy_rate"):
            for rec in run_sweep(cfg, metric=metric):
                assert rec.value >= 0.0

    def test_an_scenario_rho_grid(self):
        cfg = SweepConfig(scenario="imperfect_csi_an", algorithms=("SO-THP+S-GMI",),
                          snr_db=(12.0,), trials=2, seed=7,
                          rho_grid=(0.3, 0.6, 0.9))
        recs = run_sweep(cfg, metric="secrecy_rate")
        assert [r.snr_db for r in recs] == [0.3, 0.6, 0.9]

    def test_failures_recorded_and_excluded(self, monkeypatch):
        calls = {"n": 0}
        real = harness.ber_trial

        def flaky(cfg, algorithm, snr_db, trial):
            calls["n"] += 1
            if trial == 1:
                raise SingularMatrixError("synthetic failure")
            return real(cfg, algorithm, snr_db, trial)

        monkeypatch.setattr(harness, "ber_trial", flaky)
        cfg = SweepConfig(algorithms=("ZF",), snr_db=(5.0,), trials=4, seed=8,
                          n_symbols=32)
        failures = []
        recs = run_sweep(cfg, metric="ber", failures=failures)
        assert len(recs) == 1
        assert failures[0]["failures"] == 1 and failures[0]["flagged"]

    def test_flops_metric(self):
        cfg = SweepConfig(algorithms=("SO-THP", "SO-THP+S-GMI"), snr_db=(0.0,),
                          trials=1, seed=9)
        recs = run_sweep(cfg, metric="flops")
        totals = {r.algorithm: r.value for r in recs}
        assert totals["SO-THP+S-GMI"] < totals["SO-THP"]

    def test_unknown_metric(self):
        with pytest.raises(ConfigurationError):
            run_sweep(SweepConfig(), metric="throughput")


class TestEmitResults:
    def records(self):
        return [SweepRecord("ZF", 10.0, "ber", 0.012345678901234, 5, 1),
                SweepRecord("SO-THP", float("inf"), "ber", 0.0, 5, 1)]

    def test_csv_header_and_roundtrip(self, tmp_path):
        path = str(tmp_path / "out.csv")
        emit_results(self.records(), path, fmt="csv")
        first = open(path).readline().strip()
        assert first == "algorithm,snr_db,metric,value,trials,seed"
        back = read_records(path, fmt="csv")
        for a, b in zip(self.records(), back):
            assert a.algorithm == b.algorithm and a.metric == b.metric
            assert a.snr_db == b.snr_db
            assert abs(a.value - b.value) <= 1e-12 * max(1.0, abs(a.value))

    def test_empty_records_header_only(self, tmp_path):
        path = str(tmp_path / "empty.csv")
        emit_results([], path, fmt="csv")
        lines = open(path).read().splitlines()
        assert lines == ["algorithm,snr_db,metric,value,trials,seed"]

    def test_json_matches_csv_values(self, tmp_path):
        cfg = SweepConfig(algorithms=("ZF",), snr_db=(3.0, 9.0), trials=2,
                          seed=10, n_symbols=64)
        recs = run_sweep(cfg, metric="ber")
        csv_path, json_path = str(tmp_path / "r.csv"), str(tmp_path / "r.json")
        emit_results(recs, csv_path, fmt="csv")
        emit_results(recs, json_path, fmt="json")
        csv_vals = sorted(r.value for r in read_records(csv_path, "csv"))
        json_vals = sorted(r.value for r in read_records(json_path, "json"))
        assert csv_vals == json_vals

    def test_bad_format(self, tmp_path):
        with pytest.raises(ConfigurationError):
            emit_results([], str(tmp_path / "x.bin"), fmt="parquet")


class TestCli:
    def test_ber_sweep_end_to_end(self, tmp_path):
        cfg = {"algorithms": ["ZF"], "snr_db": [5.0], "trials": 2,
               "dims": [2, 1, 4, 2, 2], "n_symbols": 64}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        out = tmp_path / "out.csv"
        code = main(["ber-sweep", "--config", str(cfg_path), "--out", str(out),
                     "--seed", "3"])
        assert code == 0
        recs = read_records(str(out))
        assert recs and recs[0].algorithm == "ZF" and recs[0].seed == 3

    def test_bad_config_exit_code(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({"algorithms": ["DPC"]}))
        code = main(["ber-sweep", "--config", str(cfg_path),
                     "--out", str(tmp_path / "o.csv")])
        assert code == 1

    def test_limit_check_passes(self, capsys):
        assert main(["limit-check", "--pairs", "5", "--seed", "1"]) == 0
        assert "limit-check passed" in capsys.readouterr().out

    def test_flops_subcommand(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(
            {"algorithms": ["SO-THP", "SO-THP+GMI"], "trials": 1}))
        out = tmp_path / "flops.csv"
        assert main(["flops", "--config", str(cfg_path), "--out", str(out)]) == 0
        recs = read_records(str(out))
        assert {r.metric for r in recs} == {"flops"}
