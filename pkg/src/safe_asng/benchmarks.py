"""Benchmark objectives, safety functions, safe-seed generation, and a
brute-force oracle for constrained optima.

Objectives and safety functions operate on packed bit masks, so each is a
few integer operations. Formulas index bits 1-based (x_1 is stored index 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import MAX_DIM, BitString

BINVAL_MAX_DIM = 53  # beyond this the 2^i coefficients stop being exact floats
ORACLE_MAX_DIM = 20
SEED_REJECTION_CAP = 10_000_000


class InfeasibleSeedError(RuntimeError):
    """Safe-seed rejection sampling exceeded its draw cap."""


def onemax(x: BitString) -> float:
    return float(x.mask.bit_count())


def leading_ones(x: BitString) -> float:
    inv = ~x.mask & ((1 << x.d) - 1)
    if inv == 0:
        return float(x.d)
    return float((inv & -inv).bit_length() - 1)


def binval(x: BitString) -> float:
    # weight of x_i is 2^(i-1), which is exactly the mask packing
    return float(x.mask)


def reversed_binval(x: BitString) -> float:
    d, m, rv = x.d, x.mask, 0
    while m:
        lsb = m & -m
        rv |= 1 << (d - lsb.bit_length())
        m ^= lsb
    return float(rv)


def safety_compatible(x: BitString) -> float:
    """Ones among the trailing d - floor(d/2) bits, minus floor(d/4)."""
    d = x.d
    tail = ((1 << d) - 1) ^ ((1 << (d // 2)) - 1)
    return float((x.mask & tail).bit_count() - d // 4)


def safety_conflicting(x: BitString) -> float:
    """floor(d/8) minus the ones among the trailing floor(d/4) bits."""
    d = x.d
    q = d // 4
    tail = ((1 << q) - 1) << (d - q)
    return float(d // 8 - (x.mask & tail).bit_count())


OBJECTIVES: dict[str, Callable[[BitString], float]] = {
    "onemax": onemax,
    "leadingones": leading_ones,
    "binval": binval,
    "revbinval": reversed_binval,
}

SAFETIES: dict[str, list[Callable[[BitString], float]]] = {
    "none": [],
    "compatible": [safety_compatible],
    "conflicting": [safety_conflicting],
}


@dataclass
class Problem:
    name: str
    safety_name: str
    d: int
    objective: Callable[[BitString], float]
    safety: list = field(default_factory=list)
    known_optimum: Optional[float] = None

    @property
    def p(self) -> int:
        return len(self.safety)

    def evaluate(self, x: BitString) -> tuple[float, tuple]:
        return self.objective(x), tuple(s(x) for s in self.safety)


def constrained_optimum_formula(name: str, safety: str, d: int) -> float:
    """Closed-form constrained optimum of an objective over the safe set.

    The conflicting-setting formulas are verified against the enumeration
    oracle for d in 8..16 by the test suite before being trusted at larger d.
    """
    unconstrained = {
        "onemax": float(d),
        "leadingones": float(d),
        "binval": float(2**d - 1),
        "revbinval": float(2**d - 1),
    }
    if safety in ("none", "compatible"):
        # the all-ones optimum satisfies the compatible constraint
        return unconstrained[name]
    if safety == "conflicting":
        q, m = d // 4, d // 8
        if name == "onemax":
            return float(d - (q - m))
        if name == "leadingones":
            return float(d - q + m)
        if name == "binval":
            return float(2**d - 1 - (2 ** (d - m) - 2 ** (d - q)))
        if name == "revbinval":
            return float(2**d - 2 ** (q - m))
    raise ValueError(f"unknown objective/safety: {name}/{safety}")


def make_problem(name: str, safety: str, d: int) -> Problem:
    if name not in OBJECTIVES:
        raise ValueError(f"unknown objective {name!r}; choose from {sorted(OBJECTIVES)}")
    if safety not in SAFETIES:
        raise ValueError(f"unknown safety {safety!r}; choose from {sorted(SAFETIES)}")
    if not 1 <= d <= MAX_DIM:
        raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {d}")
    if name in ("binval", "revbinval") and d > BINVAL_MAX_DIM:
        raise ValueError(f"{name} requires d <= {BINVAL_MAX_DIM} for exact float coefficients")
    if safety == "compatible" and d < 4:
        raise ValueError("compatible safety requires d >= 4")
    if safety == "conflicting" and d < 8:
        raise ValueError("conflicting safety requires d >= 8")
    return Problem(
        name=name,
        safety_name=safety,
        d=d,
        objective=OBJECTIVES[name],
        safety=list(SAFETIES[safety]),
        known_optimum=constrained_optimum_formula(name, safety, d),
    )


def generate_safe_seeds(
    problem: Problem,
    n_seed: int,
    rng: np.random.Generator,
    max_draws: int = SEED_REJECTION_CAP,
) -> list[BitString]:
    """Rejection-sample n_seed uniform strings with all safety values >= 0."""
    if n_seed < 1:
        raise ValueError("n_seed must be >= 1")
    seeds: list[BitString] = []
    draws = 0
    while len(seeds) < n_seed:
        if draws >= max_draws:
            raise InfeasibleSeedError(
                f"no {n_seed} safe seeds found within {max_draws} uniform draws; "
                f"the safe set of {problem.name}/{problem.safety_name} d={problem.d} "
                "is empty or vanishingly small"
            )
        x = BitString.from_bits(rng.integers(0, 2, size=problem.d).tolist())
        draws += 1
        if all(s(x) >= 0 for s in problem.safety):
            seeds.append(x)
    return seeds


def oracle_constrained_optimum(problem: Problem) -> tuple[float, BitString]:
    """Exhaustively enumerate {0,1}^d; returns (max safe f, one argmax)."""
    if problem.d > ORACLE_MAX_DIM:
        raise ValueError(f"enumeration oracle unavailable for d > {ORACLE_MAX_DIM}")
    best_f, best_x = None, None
    for mask in range(1 << problem.d):
        x = BitString(problem.d, mask)
        if any(s(x) < 0 for s in problem.safety):
            continue
        f = problem.objective(x)
        if best_f is None or f > best_f:
            best_f, best_x = f, x
    if best_f is None:
        raise ValueError("safe set is empty")
    return best_f, best_x
