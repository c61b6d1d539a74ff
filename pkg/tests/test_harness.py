"""Experiment harness: seed derivation, CSV round-trips, summaries."""

import json
import math

import numpy as np
import pytest

from safe_asng.harness import (
    CSV_HEADER,
    Cell,
    ExperimentSpec,
    derive_seed,
    parse_trial_csv,
    run_experiment,
    run_trial,
    summarize,
    summarize_directory,
    trial_config,
    worker_count,
    write_summary_json,
    write_trial_csv,
)
from safe_asng.optimizers import RunConfig, RunResult


def fake_result(iterations, gap, unsafe, termination, best=None, evals=None,
                delta=None, trial_seed=0):
    n = len(iterations)
    cfg = RunConfig(problem="onemax", d=6, algorithm="asng", seed=trial_seed)
    return RunResult(
        config=cfg,
        iterations=np.asarray(iterations, dtype=np.int64),
        evals=np.asarray(evals if evals is not None else
                         [2 * i for i in iterations], dtype=np.int64),
        best_f=np.asarray(best if best is not None else [1.0] * n),
        gap=np.asarray(gap, dtype=np.float64),
        unsafe=np.asarray(unsafe, dtype=np.int64),
        delta=np.asarray(delta if delta is not None else [1.0] * n),
        termination=termination,
        theta_trace=[],
    )


class TestSeedDerivation:
    def test_deterministic_and_sensitive_to_every_part(self):
        a = derive_seed(0, "run", "cell", 0)
        assert a == derive_seed(0, "run", "cell", 0)
        assert a != derive_seed(0, "run", "cell", 1)
        assert a != derive_seed(0, "run", "other", 0)
        assert a != derive_seed(0, "seeds", "cell", 0)

    def test_base_seed_enters_by_xor(self):
        zero = derive_seed(0, "run", "cell", 3)
        assert derive_seed(12345, "run", "cell", 3) == 12345 ^ zero

    def test_trial_config_wires_the_run_seed(self):
        cell = Cell("onemax", "compatible", "safe-asng", 10)
        cfg = trial_config(cell, 4, base_seed=99)
        assert cfg.seed == derive_seed(99, "run", cell.cell_id, 4)
        assert (cfg.problem, cfg.safety, cfg.algorithm, cfg.d) == (
            "onemax", "compatible", "safe-asng", 10)

    def test_seed_stream_ignores_the_algorithm(self):
        # matched cells differ only in algorithm; the safe-seed stream key
        # has no algorithm component, so the derived stream seed is shared
        shared = derive_seed(7, "seeds", "onemax", "compatible", 10, 2)
        for cell in (Cell("onemax", "compatible", "safe-asng", 10),
                     Cell("onemax", "compatible", "asng-ch", 10)):
            assert derive_seed(7, "seeds", cell.problem, cell.safety,
                               cell.d, 2) == shared

    def test_cell_id_format(self):
        assert Cell("binval", "conflicting", "asng-va", 25).cell_id == \
            "binval-conflicting-asng-va-d25"


class TestTrialCsv:
    def test_roundtrip_preserves_series_and_termination(self, tmp_path):
        res = fake_result([1, 2, 3], gap=[math.inf, 2.0, 0.0],
                          unsafe=[0, 1, 1], termination="iteration-budget")
        path = tmp_path / "trial_00.csv"
        write_trial_csv(path, 0, res)
        series = parse_trial_csv(path)
        assert series.trial == 0
        assert series.iterations.tolist() == [1, 2, 3]
        assert series.gap[0] == math.inf
        assert series.gap.tolist()[1:] == [2.0, 0.0]
        assert series.unsafe.tolist() == [0.0, 1.0, 1.0]
        assert series.termination == "iteration-budget"

    def test_termination_written_only_on_the_final_row(self, tmp_path):
        res = fake_result([1, 2], gap=[1.0, 0.0], unsafe=[0, 0],
                          termination="optimum")
        path = tmp_path / "t.csv"
        write_trial_csv(path, 3, res)
        lines = path.read_text().splitlines()
        assert lines[0] == CSV_HEADER
        assert lines[1].endswith(",")
        assert lines[2].endswith(",optimum")
        assert lines[1].split(",")[0] == "3"

    def test_floats_are_written_with_full_precision(self, tmp_path):
        delta = [0.9454202502029362, 0.1]
        res = fake_result([1, 2], gap=[1.0, 0.0], unsafe=[0, 0],
                          termination="optimum", delta=delta)
        path = tmp_path / "t.csv"
        write_trial_csv(path, 0, res)
        lines = path.read_text().splitlines()
        assert lines[1].split(",")[6] == repr(delta[0])

    def _write(self, tmp_path, lines):
        path = tmp_path / "bad.csv"
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_rejects_unexpected_header(self, tmp_path):
        path = self._write(tmp_path, ["a,b,c", "0,1,2"])
        with pytest.raises(ValueError, match=r"bad\.csv:1"):
            parse_trial_csv(path)

    def test_rejects_wrong_column_count(self, tmp_path):
        path = self._write(tmp_path, [CSV_HEADER, "0,1,2,3.0,4.0,0,1.0"])
        with pytest.raises(ValueError, match=r"bad\.csv:2.*columns"):
            parse_trial_csv(path)

    def test_rejects_malformed_numbers(self, tmp_path):
        path = self._write(tmp_path, [CSV_HEADER, "0,one,2,3.0,4.0,0,1.0,x"])
        with pytest.raises(ValueError, match="malformed numeric"):
            parse_trial_csv(path)

    def test_rejects_mixed_trial_ids(self, tmp_path):
        path = self._write(tmp_path, [
            CSV_HEADER,
            "0,1,2,3.0,4.0,0,1.0,",
            "1,2,4,3.0,4.0,0,1.0,optimum",
        ])
        with pytest.raises(ValueError, match="mixed trial ids"):
            parse_trial_csv(path)

    def test_rejects_termination_before_the_final_row(self, tmp_path):
        path = self._write(tmp_path, [
            CSV_HEADER,
            "0,1,2,3.0,4.0,0,1.0,optimum",
            "0,2,4,3.0,4.0,0,1.0,optimum",
        ])
        with pytest.raises(ValueError, match="before final row"):
            parse_trial_csv(path)

    def test_rejects_missing_final_termination(self, tmp_path):
        path = self._write(tmp_path, [CSV_HEADER, "0,1,2,3.0,4.0,0,1.0,"])
        with pytest.raises(ValueError, match="termination"):
            parse_trial_csv(path)

    def test_rejects_empty_and_headerless_files(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="empty"):
            parse_trial_csv(path)
        with pytest.raises(ValueError, match="no data rows"):
            parse_trial_csv(self._write(tmp_path, [CSV_HEADER]))


class TestSummarize:
    def _trials(self, tmp_path, results):
        paths = []
        for t, res in enumerate(results):
            p = tmp_path / f"trial_{t:02d}.csv"
            write_trial_csv(p, t, res)
            paths.append(p)
        return paths

    def test_identical_trials_collapse_the_quartile_band(self, tmp_path):
        res = fake_result([1, 2, 3], gap=[3.0, 2.0, 1.0], unsafe=[0, 0, 1],
                          termination="iteration-budget")
        paths = self._trials(tmp_path, [res, res, res])
        summary = summarize(paths)
        assert summary["trials"] == 3
        assert summary["iterations"] == [1, 2, 3]
        assert summary["gap"]["median"] == [3.0, 2.0, 1.0]
        assert summary["gap"]["q25"] == summary["gap"]["q75"] == [3.0, 2.0, 1.0]
        assert summary["final"]["unsafe_median"] == 1.0

    def test_final_median_over_odd_trial_count(self, tmp_path):
        results = [
            fake_result([1], gap=[0.0], unsafe=[0], termination="optimum"),
            fake_result([1], gap=[10.0], unsafe=[3], termination="iteration-budget"),
            fake_result([1], gap=[100.0], unsafe=[9], termination="iteration-budget"),
        ]
        summary = summarize(self._trials(tmp_path, results))
        assert summary["final"]["gap_median"] == 10.0
        assert summary["final"]["unsafe_median"] == 3.0
        assert sorted(summary["final"]["gap_values"]) == [0.0, 10.0, 100.0]
        assert summary["final"]["terminations"] == {
            "optimum": 1, "iteration-budget": 2}

    def test_short_trials_carry_their_final_value_forward(self, tmp_path):
        results = [
            fake_result([1, 2], gap=[4.0, 2.0], unsafe=[0, 1],
                        termination="unsafe-budget"),
            fake_result([1, 2, 3, 4], gap=[4.0, 4.0, 4.0, 0.0],
                        unsafe=[0, 0, 0, 0], termination="iteration-budget"),
        ]
        summary = summarize(self._trials(tmp_path, results))
        assert summary["iterations"] == [1, 2, 3, 4]
        # trial 0 holds gap=2.0 and unsafe=1 from iteration 2 onward
        assert summary["gap"]["median"] == [4.0, 3.0, 3.0, 1.0]
        assert summary["unsafe"]["median"] == [0.0, 0.5, 0.5, 0.5]

    def test_requires_at_least_one_trial(self):
        with pytest.raises(ValueError):
            summarize([])


class TestSummaryJson:
    def test_nonfinite_floats_become_strings(self, tmp_path):
        path = tmp_path / "s.json"
        write_summary_json(path, {
            "a": math.inf, "b": -math.inf, "c": math.nan,
            "nested": [1.0, math.inf], "ok": 2.5,
        })
        data = json.loads(path.read_text())
        assert data["a"] == "inf" and data["b"] == "-inf" and data["c"] == "nan"
        assert data["nested"] == [1.0, "inf"]
        assert data["ok"] == 2.5

    def test_output_is_stable_and_newline_terminated(self, tmp_path):
        p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
        payload = {"z": 1, "a": [2, 3], "m": {"y": 0.5, "x": 1.5}}
        write_summary_json(p1, payload)
        write_summary_json(p2, {"m": {"x": 1.5, "y": 0.5}, "a": [2, 3], "z": 1})
        assert p1.read_bytes() == p2.read_bytes()
        assert p1.read_text().endswith("\n")


class TestRunExperiment:
    def test_writes_trials_and_summary_per_cell(self, tmp_path):
        spec = ExperimentSpec(
            cells=[Cell("onemax", "none", "asng", 6)],
            out_dir=tmp_path / "out", trials=2, base_seed=5, max_iterations=4,
        )
        summary_paths = run_experiment(spec)
        cell_dir = tmp_path / "out" / "onemax-none-asng-d6"
        assert summary_paths == [cell_dir / "summary.json"]
        assert (cell_dir / "trial_00.csv").exists()
        assert (cell_dir / "trial_01.csv").exists()
        summary = json.loads(summary_paths[0].read_text())
        assert summary["trials"] == 2
        assert summary["cell"] == {"problem": "onemax", "safety": "none",
                                   "algorithm": "asng", "d": 6}
        assert summary["base_seed"] == 5
        assert "seed_rule" in summary
        assert summary["config"]["max_iterations"] == 4

    def test_theta_traces_are_written_when_requested(self, tmp_path):
        spec = ExperimentSpec(
            cells=[Cell("onemax", "none", "asng", 6)],
            out_dir=tmp_path / "out", trials=1, max_iterations=6,
            theta_trace_every=2,
        )
        run_experiment(spec)
        trace = tmp_path / "out" / "onemax-none-asng-d6" / "trial_00_theta.csv"
        lines = trace.read_text().splitlines()
        assert lines[0] == "iter," + ",".join(f"theta_{i}" for i in range(6))
        assert [ln.split(",")[0] for ln in lines[1:]] == ["0", "2", "4", "6"]

    def test_reruns_are_byte_identical(self, tmp_path):
        def run_into(name):
            spec = ExperimentSpec(
                cells=[Cell("onemax", "compatible", "asng-ch", 8)],
                out_dir=tmp_path / name, trials=2, base_seed=1, max_iterations=10,
            )
            return run_experiment(spec)

        first, second = run_into("a"), run_into("b")
        for p1, p2 in zip(first, second):
            assert p1.read_bytes() == p2.read_bytes()
        for name in ("trial_00.csv", "trial_01.csv"):
            a = tmp_path / "a" / "onemax-compatible-asng-ch-d8" / name
            b = tmp_path / "b" / "onemax-compatible-asng-ch-d8" / name
            assert a.read_bytes() == b.read_bytes()

    def test_matched_cells_share_safe_seeds(self, monkeypatch):
        import safe_asng.harness as harness_mod

        real = harness_mod.generate_safe_seeds
        produced = []

        def spy(problem, n_seed, rng, **kw):
            seeds = real(problem, n_seed, rng, **kw)
            produced.append(seeds)
            return seeds

        monkeypatch.setattr(harness_mod, "generate_safe_seeds", spy)
        for algorithm in ("asng-ch", "safe-asng", "asng-va"):
            run_trial(Cell("onemax", "compatible", algorithm, 8), 0, 3,
                      {"max_iterations": 1})
        # same (problem, safety, d, trial) => identical seed strings for
        # every algorithm
        assert produced[0] == produced[1] == produced[2]
        # a different trial draws different seeds
        run_trial(Cell("onemax", "compatible", "asng-ch", 8), 1, 3,
                  {"max_iterations": 1})
        assert produced[3] != produced[0]


class TestSummarizeDirectory:
    def test_recomputes_summaries_and_preserves_identity_keys(self, tmp_path):
        spec = ExperimentSpec(
            cells=[Cell("onemax", "none", "asng", 6)],
            out_dir=tmp_path / "out", trials=2, base_seed=9, max_iterations=4,
        )
        (summary_path,) = run_experiment(spec)
        before = json.loads(summary_path.read_text())
        summary_path.write_text(json.dumps({"cell": before["cell"],
                                            "base_seed": 9}))
        written = summarize_directory(tmp_path / "out")
        assert written == [summary_path]
        after = json.loads(summary_path.read_text())
        assert after["cell"] == before["cell"]
        assert after["base_seed"] == 9
        assert after["gap"] == before["gap"]

    def test_accepts_a_single_cell_directory(self, tmp_path):
        spec = ExperimentSpec(
            cells=[Cell("onemax", "none", "asng", 6)],
            out_dir=tmp_path / "out", trials=1, max_iterations=3,
        )
        run_experiment(spec)
        cell_dir = tmp_path / "out" / "onemax-none-asng-d6"
        (cell_dir / "summary.json").unlink()
        written = summarize_directory(cell_dir)
        assert written == [cell_dir / "summary.json"]

    def test_rejects_directories_without_trials(self, tmp_path):
        (tmp_path / "empty").mkdir()
        with pytest.raises(ValueError):
            summarize_directory(tmp_path / "empty")


class TestWorkerCount:
    def test_env_override_wins(self, monkeypatch):
        monkeypatch.setenv("SAFE_ASNG_WORKERS", "3")
        assert worker_count() == 3
        monkeypatch.setenv("SAFE_ASNG_WORKERS", "0")
        assert worker_count() == 1

    def test_defaults_to_cpu_count(self, monkeypatch):
        monkeypatch.delenv("SAFE_ASNG_WORKERS", raising=False)
        assert worker_count() >= 1
