"""Constraint-aware comparison of evaluated samples.

Feasible solutions are ranked by objective value; infeasible ones by total
violation (sum of negative safety values), regardless of objective. Two
solutions with equal violation fall back to the objective comparison.
"""

from __future__ import annotations

import numpy as np

from .core import EvaluatedSample

A_BETTER = 1
B_BETTER = -1
TIE = 0


def violation(s_values) -> float:
    """Sum of the negative parts of the safety values; 0.0 when all safe."""
    s = np.asarray(s_values, dtype=np.float64)
    if s.size == 0:
        return 0.0
    return float(np.minimum(s, 0.0).sum())


def prefer(a: EvaluatedSample, b: EvaluatedSample) -> int:
    va, vb = violation(a.s), violation(b.s)
    if va == vb:  # covers both-feasible (0 == 0) and equal violations
        if a.f > b.f:
            return A_BETTER
        if a.f < b.f:
            return B_BETTER
        return TIE
    return A_BETTER if va > vb else B_BETTER


def utilities_for_pair(a: EvaluatedSample, b: EvaluatedSample) -> tuple[float, float]:
    """Two-sample utilities under the constrained ordering; a wins ties."""
    return (1.0, -1.0) if prefer(a, b) >= 0 else (-1.0, 1.0)
