"""Safe optimization over binary strings with a Bernoulli search
distribution: surrogate-estimated Lipschitz bounds carve Hamming-ball safe
regions out of the archive of evaluated points, and proposals are projected
into them before being evaluated."""

from ._kernels import ACTIVE_BACKEND
from .benchmarks import InfeasibleSeedError, Problem, generate_safe_seeds, make_problem
from .bernoulli import AsngState, BernoulliParams, asng_update
from .core import Archive, BitString, EvaluatedSample, hamming_distance
from .harness import Cell, ExperimentSpec, run_experiment, summarize
from .optimizers import (
    ALGORITHMS,
    RunConfig,
    RunResult,
    run,
    run_asng_ch,
    run_asng_plain,
    run_asng_va,
    run_safe_asng,
)
from .safe_region import NoSafeCenterError, SafeRegion, project
from .walsh import NormalEquationsCache, WalshBasis, WalshModel, enumerate_basis, fit

__version__ = "0.1.0"

__all__ = [
    "ACTIVE_BACKEND",
    "ALGORITHMS",
    "Archive",
    "AsngState",
    "BernoulliParams",
    "BitString",
    "Cell",
    "EvaluatedSample",
    "ExperimentSpec",
    "InfeasibleSeedError",
    "NoSafeCenterError",
    "NormalEquationsCache",
    "Problem",
    "RunConfig",
    "RunResult",
    "SafeRegion",
    "WalshBasis",
    "WalshModel",
    "asng_update",
    "enumerate_basis",
    "fit",
    "generate_safe_seeds",
    "hamming_distance",
    "make_problem",
    "project",
    "run",
    "run_asng_ch",
    "run_asng_plain",
    "run_asng_va",
    "run_experiment",
    "run_safe_asng",
    "summarize",
    "__version__",
]
