"""Experiment harness: seeded multi-trial execution and result files.

Per (cell, trial) one CSV of per-iteration rows; per cell one JSON summary
with median/quartile curves. Trial seeds derive from the base seed by
hashing, and the safe-seed stream hashes only (problem, safety, d, trial) —
not the algorithm — so every algorithm in a matched cell sees the same
seeds. All numbers are written with repr(), making reruns byte-identical.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .benchmarks import generate_safe_seeds, make_problem
from .optimizers import RunConfig, RunResult, run

WORKERS_ENV = "SAFE_ASNG_WORKERS"
CSV_HEADER = "trial,iter,evals,best_safe_f,gap,unsafe,delta,term"
SEED_RULE = ("run seed = base_seed XOR first-8-bytes-LE of sha256('run:'+cell_id+':'+trial); "
             "safe-seed stream = base_seed XOR sha256('seeds:'+problem+':'+safety+':'+d+':'+trial); "
             "the seed stream ignores the algorithm so matched cells share seeds")


@dataclass(frozen=True)
class Cell:
    problem: str
    safety: str
    algorithm: str
    d: int

    @property
    def cell_id(self) -> str:
        return f"{self.problem}-{self.safety}-{self.algorithm}-d{self.d}"


@dataclass
class ExperimentSpec:
    cells: list[Cell]
    out_dir: Path
    trials: int = 25
    base_seed: int = 0
    max_iterations: int | None = None
    unsafe_budget: int | None = None
    walsh_order: int | None = None
    theta_trace_every: int = 0
    early_stop_at_optimum: bool = False

    def overrides(self) -> dict:
        out = {}
        if self.max_iterations is not None:
            out["max_iterations"] = self.max_iterations
        if self.unsafe_budget is not None:
            out["unsafe_budget"] = self.unsafe_budget
        if self.walsh_order is not None:
            out["walsh_order"] = self.walsh_order
        if self.theta_trace_every:
            out["theta_trace_every"] = self.theta_trace_every
        if self.early_stop_at_optimum:
            out["early_stop_at_optimum"] = True
        return out


def derive_seed(base_seed: int, *parts) -> int:
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return base_seed ^ int.from_bytes(digest[:8], "little")


def trial_config(cell: Cell, trial: int, base_seed: int, overrides: dict | None = None) -> RunConfig:
    return RunConfig(
        problem=cell.problem,
        d=cell.d,
        algorithm=cell.algorithm,
        safety=cell.safety,
        seed=derive_seed(base_seed, "run", cell.cell_id, trial),
        **(overrides or {}),
    )


def run_trial(cell: Cell, trial: int, base_seed: int, overrides: dict | None = None) -> RunResult:
    config = trial_config(cell, trial, base_seed, overrides)
    problem = make_problem(cell.problem, cell.safety, cell.d)
    seeds = None
    if cell.algorithm != "asng":
        seed_rng = np.random.default_rng(
            derive_seed(base_seed, "seeds", cell.problem, cell.safety, cell.d, trial)
        )
        seeds = generate_safe_seeds(problem, config.n_seed, seed_rng)
    return run(config, problem=problem, seeds=seeds)


def _execute_trial(args):
    cell, trial, base_seed, overrides = args
    return cell, trial, run_trial(cell, trial, base_seed, overrides)


def worker_count() -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _format(v) -> str:
    return repr(float(v))


def write_trial_csv(path: Path, trial: int, result: RunResult) -> None:
    lines = [CSV_HEADER]
    last = len(result.iterations) - 1
    for i in range(len(result.iterations)):
        term = result.termination if i == last else ""
        lines.append(
            f"{trial},{result.iterations[i]},{result.evals[i]},"
            f"{_format(result.best_f[i])},{_format(result.gap[i])},"
            f"{result.unsafe[i]},{_format(result.delta[i])},{term}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def write_theta_trace_csv(path: Path, result: RunResult) -> None:
    d = result.config.d
    header = "iter," + ",".join(f"theta_{i}" for i in range(d))
    lines = [header]
    for iteration, theta in result.theta_trace:
        lines.append(f"{iteration}," + ",".join(_format(v) for v in theta))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


@dataclass
class TrialSeries:
    trial: int
    iterations: np.ndarray
    gap: np.ndarray
    unsafe: np.ndarray
    best_f: np.ndarray
    termination: str


def parse_trial_csv(path: Path) -> TrialSeries:
    def fail(line_no: int, msg: str):
        raise ValueError(f"{path}:{line_no}: {msg}")

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}:1: empty file")
    if rows[0] != CSV_HEADER.split(","):
        raise ValueError(f"{path}:1: unexpected header {rows[0]!r}")
    trial = None
    iters, gaps, unsafe, best = [], [], [], []
    termination = ""
    for line_no, row in enumerate(rows[1:], start=2):
        if len(row) != 8:
            fail(line_no, f"expected 8 columns, got {len(row)}")
        try:
            t = int(row[0])
            iters.append(int(row[1]))
            int(row[2])
            best.append(float(row[3]))
            gaps.append(float(row[4]))
            unsafe.append(int(row[5]))
            float(row[6])
        except ValueError:
            fail(line_no, f"malformed numeric field in {row!r}")
        if trial is None:
            trial = t
        elif t != trial:
            fail(line_no, f"mixed trial ids {trial} and {t}")
        if row[7]:
            if line_no != len(rows):
                fail(line_no, "termination reason before final row")
            termination = row[7]
    if not iters:
        raise ValueError(f"{path}:2: no data rows")
    if not termination:
        raise ValueError(f"{path}:{len(rows)}: final row lacks a termination reason")
    return TrialSeries(
        trial=trial,
        iterations=np.array(iters, dtype=np.int64),
        gap=np.array(gaps, dtype=np.float64),
        unsafe=np.array(unsafe, dtype=np.float64),
        best_f=np.array(best, dtype=np.float64),
        termination=termination,
    )


def _carry_forward(series: list[TrialSeries], attr: str, t_max: int) -> np.ndarray:
    out = np.empty((len(series), t_max))
    for i, s in enumerate(series):
        vals = getattr(s, attr)
        n = len(vals)
        out[i, :n] = vals
        out[i, n:] = vals[-1]
    return out


def _quartiles(matrix: np.ndarray) -> dict:
    return {
        "median": np.median(matrix, axis=0).tolist(),
        "q25": np.percentile(matrix, 25, axis=0).tolist(),
        "q75": np.percentile(matrix, 75, axis=0).tolist(),
    }


def summarize(csv_paths: list[Path]) -> dict:
    """Per-iteration median and quartiles across trials, with trials that
    terminated early carried forward at their final values."""
    if not csv_paths:
        raise ValueError("need at least one trial CSV")
    series = [parse_trial_csv(Path(p)) for p in sorted(csv_paths)]
    t_max = max(int(s.iterations[-1]) for s in series)
    gap = _carry_forward(series, "gap", t_max)
    unsafe = _carry_forward(series, "unsafe", t_max)
    terminations: dict[str, int] = {}
    for s in series:
        terminations[s.termination] = terminations.get(s.termination, 0) + 1
    return {
        "trials": len(series),
        "iterations": list(range(1, t_max + 1)),
        "gap": _quartiles(gap),
        "unsafe": _quartiles(unsafe),
        "final": {
            "gap_median": float(np.median(gap[:, -1])),
            "unsafe_median": float(np.median(unsafe[:, -1])),
            "best_f_median": float(np.median([s.best_f[-1] for s in series])),
            "gap_values": gap[:, -1].tolist(),
            "unsafe_values": unsafe[:, -1].tolist(),
            "terminations": terminations,
        },
    }


def _jsonable(value):
    """JSON with strict-parser-friendly non-finite floats ('inf', '-inf',
    'nan' as strings)."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return "inf" if value > 0 else ("-inf" if value < 0 else "nan")
    return value


def write_summary_json(path: Path, summary: dict) -> None:
    text = json.dumps(_jsonable(summary), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")


def run_experiment(spec: ExperimentSpec) -> list[Path]:
    """Execute all (cell, trial) runs, write per-trial CSVs and per-cell
    summary JSONs; returns the summary paths. Worker count comes from the
    SAFE_ASNG_WORKERS variable (default: CPU count); with one worker
    everything runs in-process."""
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    overrides = spec.overrides()
    tasks = [(cell, trial, spec.base_seed, overrides)
             for cell in spec.cells for trial in range(spec.trials)]
    workers = min(worker_count(), len(tasks))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_execute_trial, tasks))
    else:
        outcomes = [_execute_trial(t) for t in tasks]

    by_cell: dict[Cell, list[tuple[int, RunResult]]] = {cell: [] for cell in spec.cells}
    for cell, trial, result in outcomes:
        by_cell[cell].append((trial, result))

    summary_paths = []
    for cell in spec.cells:
        cell_dir = out_dir / cell.cell_id
        cell_dir.mkdir(parents=True, exist_ok=True)
        csv_paths = []
        for trial, result in sorted(by_cell[cell]):
            csv_path = cell_dir / f"trial_{trial:02d}.csv"
            write_trial_csv(csv_path, trial, result)
            csv_paths.append(csv_path)
            if spec.theta_trace_every:
                write_theta_trace_csv(cell_dir / f"trial_{trial:02d}_theta.csv", result)
        summary = summarize(csv_paths)
        summary["cell"] = dataclasses.asdict(cell)
        summary["base_seed"] = spec.base_seed
        summary["seed_rule"] = SEED_RULE
        summary["config"] = dataclasses.asdict(
            trial_config(cell, 0, spec.base_seed, overrides)
        )
        summary_path = cell_dir / "summary.json"
        write_summary_json(summary_path, summary)
        summary_paths.append(summary_path)
    return summary_paths


def summarize_directory(in_dir: Path) -> list[Path]:
    """(Re)compute summary.json for every cell directory under in_dir; a
    directory containing trial CSVs directly is treated as one cell."""
    in_dir = Path(in_dir)
    cell_dirs = []
    if list(in_dir.glob("trial_*.csv")):
        cell_dirs.append(in_dir)
    else:
        cell_dirs.extend(sub for sub in sorted(in_dir.iterdir())
                         if sub.is_dir() and list(sub.glob("trial_*.csv")))
    if not cell_dirs:
        raise ValueError(f"no trial CSVs found under {in_dir}")
    written = []
    for cell_dir in cell_dirs:
        csv_paths = sorted(p for p in cell_dir.glob("trial_*.csv")
                           if not p.stem.endswith("_theta"))
        summary = summarize(csv_paths)
        existing = cell_dir / "summary.json"
        if existing.exists():
            try:
                previous = json.loads(existing.read_text(encoding="utf-8"))
                for key in ("cell", "base_seed", "seed_rule", "config"):
                    if key in previous:
                        summary[key] = previous[key]
            except json.JSONDecodeError:
                pass
        write_summary_json(existing, summary)
        written.append(existing)
    return written
