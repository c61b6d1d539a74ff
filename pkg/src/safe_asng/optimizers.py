"""Optimization loops: the safe optimizer and three baselines.

All four variants share the two-sample natural-gradient engine; they differ
in how samples are generated (projection into a safe region, candidate
screening against the archive, or direct sampling) and in how the pair is
ranked (constraint-aware or objective-only).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import ranking
from ._kernels import nearest_median_safety
from .benchmarks import Problem, generate_safe_seeds, make_problem
from .bernoulli import AsngState, asng_update, utilities_for_objective_pair
from .core import Archive, BitString, EvaluatedSample, pack_rows
from .safe_region import (
    NoSafeCenterError,
    build_safe_region,
    correct_degeneration,
    estimate_lipschitz_raw,
    inflate_small_data,
    project,
    repair_duplicate,
    select_archives,
    select_d0_indices,
)
from .walsh import NormalEquationsCache, enumerate_basis

ALGORITHMS = ("safe-asng", "asng-ch", "asng-va", "asng")

TERM_ITERATION_BUDGET = "iteration-budget"
TERM_UNSAFE_BUDGET = "unsafe-budget"
TERM_NO_SAFE_CENTER = "no-safe-center"
TERM_VA_EXHAUSTED = "va-exhausted"
TERM_OPTIMUM = "optimum"


def default_walsh_order(d: int) -> int:
    return 2 if d <= 25 else 1


@dataclass
class RunConfig:
    """One run's full parameterization; None fields resolve to the
    dimension-dependent defaults on construction."""

    problem: str
    d: int
    algorithm: str
    safety: str = "none"
    lam: int = 2
    max_iterations: Optional[int] = None  # d^3
    unsafe_budget: int = 100
    n_seed: int = 10
    n_safe: Optional[int] = None  # 10 * d
    t_data: Optional[int] = None  # 10 * d
    zeta_data: float = 10.0
    walsh_order: Optional[int] = None  # 2 up to d=25, else 1
    lipschitz_samples: int = 100
    va_pool: Optional[int] = None  # 10 * d
    w_safe: float = 1.0
    w_unsafe: float = 1.0
    seed: int = 0
    early_stop_at_optimum: bool = False
    theta_trace_every: int = 0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}"
            )
        if self.lam != 2:
            raise ValueError("only lam=2 is supported (utilities are pairwise)")
        if self.max_iterations is None:
            self.max_iterations = self.d**3
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.n_seed < 1:
            raise ValueError("n_seed must be >= 1")
        if self.n_safe is None:
            self.n_safe = 10 * self.d
        if self.t_data is None:
            self.t_data = 10 * self.d
        if self.walsh_order is None:
            self.walsh_order = default_walsh_order(self.d)
        if self.va_pool is None:
            self.va_pool = 10 * self.d


@dataclass
class RunResult:
    config: RunConfig
    iterations: np.ndarray  # 1-based iteration numbers
    evals: np.ndarray       # cumulative evaluations (seeds included)
    best_f: np.ndarray      # best objective among safe evaluations so far
    gap: np.ndarray         # known optimum minus best_f (inf before any safe hit)
    unsafe: np.ndarray      # cumulative count of evaluations with some s_j < 0
    delta: np.ndarray       # step size after each iteration's update
    termination: str
    theta_trace: list       # (iteration, theta-copy) pairs when tracing is on

    @property
    def n_iterations(self) -> int:
        return int(self.iterations[-1]) if self.iterations.size else 0

    @property
    def final_gap(self) -> float:
        return float(self.gap[-1])

    @property
    def final_unsafe(self) -> int:
        return int(self.unsafe[-1])

    @property
    def final_best_f(self) -> float:
        return float(self.best_f[-1])


class _Tracker:
    """Evaluation bookkeeping shared by all loops: the global evaluation
    counter, unsafe tally, best safe objective, and per-iteration rows."""

    def __init__(self, problem: Problem):
        self.problem = problem
        self.known = problem.known_optimum
        self.evals = 0
        self.unsafe = 0
        self.best = -math.inf
        self.rows_iter: list[int] = []
        self.rows_evals: list[int] = []
        self.rows_best: list[float] = []
        self.rows_gap: list[float] = []
        self.rows_unsafe: list[int] = []
        self.rows_delta: list[float] = []

    def evaluate(self, x: BitString) -> EvaluatedSample:
        f, s = self.problem.evaluate(x)
        sample = EvaluatedSample(x, f, s, self.evals)
        self.evals += 1
        if sample.is_safe():
            if f > self.best:
                self.best = f
        else:
            self.unsafe += 1
        return sample

    def gap(self) -> float:
        if self.known is None:
            return math.nan
        if self.best == -math.inf:
            return math.inf
        return self.known - self.best

    def at_optimum(self) -> bool:
        return self.known is not None and self.best >= self.known

    def record(self, iteration: int, delta: float) -> None:
        self.rows_iter.append(iteration)
        self.rows_evals.append(self.evals)
        self.rows_best.append(self.best)
        self.rows_gap.append(self.gap())
        self.rows_unsafe.append(self.unsafe)
        self.rows_delta.append(delta)

    def result(self, config: RunConfig, termination: str, theta_trace: list) -> RunResult:
        return RunResult(
            config=config,
            iterations=np.array(self.rows_iter, dtype=np.int64),
            evals=np.array(self.rows_evals, dtype=np.int64),
            best_f=np.array(self.rows_best, dtype=np.float64),
            gap=np.array(self.rows_gap, dtype=np.float64),
            unsafe=np.array(self.rows_unsafe, dtype=np.int64),
            delta=np.array(self.rows_delta, dtype=np.float64),
            termination=termination,
            theta_trace=theta_trace,
        )


def _start_trace(config: RunConfig, state: AsngState) -> list:
    if config.theta_trace_every > 0:
        return [(0, state.params.theta.copy())]
    return []


def _step_trace(trace: list, config: RunConfig, iteration: int, state: AsngState) -> None:
    if config.theta_trace_every > 0 and iteration % config.theta_trace_every == 0:
        trace.append((iteration, state.params.theta.copy()))


def _pair_update(state: AsngState, evaluated: list[EvaluatedSample], utilities) -> AsngState:
    bits = np.array([e.x.to_array() for e in evaluated])
    return asng_update(state, bits, utilities)


def run_safe_asng(config: RunConfig, problem: Problem, seeds,
                  observer: Optional[Callable] = None) -> RunResult:
    """Surrogate-guarded loop: refit safety surrogates, bound their
    per-flip change, build the Hamming-ball region around recent safe
    archive points, and project both samples into it before evaluating."""
    rng = np.random.default_rng(config.seed)
    tracker = _Tracker(problem)
    archive = Archive()
    for x in seeds:
        archive.insert(tracker.evaluate(x))
    state = AsngState.from_seeds(seeds, config.d)
    basis = enumerate_basis(config.d, config.walsh_order)
    cache = NormalEquationsCache(basis, n_targets=problem.p)
    ingested = 0
    trace = _start_trace(config, state)
    termination = TERM_ITERATION_BUDGET
    for it in range(1, config.max_iterations + 1):
        while ingested < len(archive):
            entry = archive[ingested]
            cache.ingest(entry.x, entry.s)
            ingested += 1
        models = cache.solve()
        raw = estimate_lipschitz_raw(models, state.params, rng, config.lipschitz_samples)
        raw = inflate_small_data(raw, len(archive), config.t_data, config.zeta_data)
        d0_idx = select_d0_indices(archive, config.n_safe)
        lhat = correct_degeneration(raw, archive.safety_view()[d0_idx])
        try:
            d_idx, _ = select_archives(archive, lhat, config.n_safe, d0_idx)
        except NoSafeCenterError:
            termination = TERM_NO_SAFE_CENTER
            tracker.record(it, state.delta)
            break
        region = build_safe_region(
            config.d, archive.masks_view()[d_idx], archive.safety_view()[d_idx], lhat
        )
        evaluated = []
        generated: set[BitString] = set()
        for i in range(config.lam):
            proposal = project(state.params.sample(rng), region, state.params)
            x = proposal.x if i == 0 else repair_duplicate(proposal, generated)
            generated.add(x)
            evaluated.append(tracker.evaluate(x))
        utilities = ranking.utilities_for_pair(evaluated[0], evaluated[1])
        state = _pair_update(state, evaluated, utilities)
        for sample in evaluated:
            archive.insert(sample)
        tracker.record(it, state.delta)
        _step_trace(trace, config, it, state)
        if observer is not None:
            observer(it, state)
        if tracker.unsafe >= config.unsafe_budget:
            termination = TERM_UNSAFE_BUDGET
            break
        if config.early_stop_at_optimum and tracker.at_optimum():
            termination = TERM_OPTIMUM
            break
    return tracker.result(config, termination, trace)


def run_asng_ch(config: RunConfig, problem: Problem, seeds,
                observer: Optional[Callable] = None) -> RunResult:
    """Seed-initialized loop with constraint-aware ranking only: no
    surrogates and no projection."""
    rng = np.random.default_rng(config.seed)
    tracker = _Tracker(problem)
    for x in seeds:
        tracker.evaluate(x)
    state = AsngState.from_seeds(seeds, config.d)
    trace = _start_trace(config, state)
    termination = TERM_ITERATION_BUDGET
    for it in range(1, config.max_iterations + 1):
        evaluated = [tracker.evaluate(state.params.sample(rng)) for _ in range(config.lam)]
        utilities = ranking.utilities_for_pair(evaluated[0], evaluated[1])
        state = _pair_update(state, evaluated, utilities)
        tracker.record(it, state.delta)
        _step_trace(trace, config, it, state)
        if observer is not None:
            observer(it, state)
        if tracker.unsafe >= config.unsafe_budget:
            termination = TERM_UNSAFE_BUDGET
            break
        if config.early_stop_at_optimum and tracker.at_optimum():
            termination = TERM_OPTIMUM
            break
    return tracker.result(config, termination, trace)


def run_asng_va(config: RunConfig, problem: Problem, seeds,
                observer: Optional[Callable] = None) -> RunResult:
    """Seed-initialized loop that screens each sample against the archive:
    a candidate passes when the per-component median safety of its nearest
    archive entries (weighted Hamming distance) is non-negative. Each
    accepted sample joins the archive immediately, so the second draw of an
    iteration is screened against the first."""
    rng = np.random.default_rng(config.seed)
    tracker = _Tracker(problem)
    archive = Archive()
    for x in seeds:
        archive.insert(tracker.evaluate(x))
    state = AsngState.from_seeds(seeds, config.d)
    trace = _start_trace(config, state)
    termination = TERM_ITERATION_BUDGET
    for it in range(1, config.max_iterations + 1):
        evaluated = []
        exhausted = False
        for _ in range(config.lam):
            candidates = state.params.sample_array(rng, config.va_pool)
            cand_masks = pack_rows(candidates)
            s_view = archive.safety_view()
            entry_safe = (s_view >= 0).all(axis=1)
            inv_w = np.where(entry_safe, 1.0 / config.w_safe, 1.0 / config.w_unsafe)
            medians = nearest_median_safety(cand_masks, archive.masks_view(), s_view, inv_w)
            qualifying = np.flatnonzero((medians >= 0).all(axis=1))
            if qualifying.size == 0:
                exhausted = True
                break
            pick = int(qualifying[rng.integers(qualifying.size)])
            sample = tracker.evaluate(BitString.from_array(candidates[pick]))
            archive.insert(sample)
            evaluated.append(sample)
        if exhausted:
            termination = TERM_VA_EXHAUSTED
            tracker.record(it, state.delta)
            break
        utilities = utilities_for_objective_pair(evaluated[0].f, evaluated[1].f)
        state = _pair_update(state, evaluated, utilities)
        tracker.record(it, state.delta)
        _step_trace(trace, config, it, state)
        if observer is not None:
            observer(it, state)
        if tracker.unsafe >= config.unsafe_budget:
            termination = TERM_UNSAFE_BUDGET
            break
        if config.early_stop_at_optimum and tracker.at_optimum():
            termination = TERM_OPTIMUM
            break
    return tracker.result(config, termination, trace)


def run_asng_plain(config: RunConfig, problem: Problem,
                   observer: Optional[Callable] = None) -> RunResult:
    """The unmodified engine: uniform start, objective-only utilities."""
    rng = np.random.default_rng(config.seed)
    tracker = _Tracker(problem)
    state = AsngState.fresh(config.d)
    trace = _start_trace(config, state)
    termination = TERM_ITERATION_BUDGET
    for it in range(1, config.max_iterations + 1):
        evaluated = [tracker.evaluate(state.params.sample(rng)) for _ in range(config.lam)]
        utilities = utilities_for_objective_pair(evaluated[0].f, evaluated[1].f)
        state = _pair_update(state, evaluated, utilities)
        tracker.record(it, state.delta)
        _step_trace(trace, config, it, state)
        if observer is not None:
            observer(it, state)
        if tracker.unsafe >= config.unsafe_budget:
            termination = TERM_UNSAFE_BUDGET
            break
        if config.early_stop_at_optimum and tracker.at_optimum():
            termination = TERM_OPTIMUM
            break
    return tracker.result(config, termination, trace)


def run(config: RunConfig, problem: Optional[Problem] = None, seeds=None,
        observer: Optional[Callable] = None) -> RunResult:
    """Dispatch on config.algorithm. When seeds are needed but not given,
    they are drawn from a stream derived from (config.seed, 1) so the run's
    own stream stays untouched; callers that share seeds across algorithms
    (the experiment harness) pass them in explicitly."""
    if problem is None:
        problem = make_problem(config.problem, config.safety, config.d)
    if config.algorithm == "asng":
        return run_asng_plain(config, problem, observer=observer)
    if seeds is None:
        seed_rng = np.random.default_rng([config.seed, 1])
        seeds = generate_safe_seeds(problem, config.n_seed, seed_rng)
    if config.algorithm == "safe-asng":
        return run_safe_asng(config, problem, seeds, observer=observer)
    if config.algorithm == "asng-ch":
        return run_asng_ch(config, problem, seeds, observer=observer)
    return run_asng_va(config, problem, seeds, observer=observer)
