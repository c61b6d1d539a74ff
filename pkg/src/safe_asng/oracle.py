"""Brute-force reference implementations used to validate the fast paths.

Everything here recomputes results by full enumeration with plain Python
integer arithmetic, deliberately sharing no code with the modules it
checks; dimension caps keep each check around a second.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .benchmarks import OBJECTIVES, SAFETIES, make_problem
from .core import BitString

FIT_MAX_DIM = 12
REGION_MAX_DIM = 12
PROJECTION_MAX_DIM = 10


@dataclass
class OracleReport:
    check: str
    instance: str
    oracle_value: float
    impl_value: float
    abs_err: float
    rel_err: float
    tol: float
    passed: bool

    @classmethod
    def compare(cls, check: str, instance: str, oracle_value: float,
                impl_value: float, tol: float) -> "OracleReport":
        abs_err = abs(impl_value - oracle_value)
        scale = max(abs(oracle_value), abs(impl_value), 1e-300)
        return cls(check=check, instance=instance, oracle_value=oracle_value,
                   impl_value=impl_value, abs_err=abs_err, rel_err=abs_err / scale,
                   tol=tol, passed=abs_err <= tol)


def exhaustive_fit(target, d: int, r: int) -> np.ndarray:
    """Least-squares coefficients of `target` over the full cube, solved by
    SVD on an explicitly built design matrix. Subset order: size, then
    lexicographic, matching the fast path so vectors are comparable."""
    if d > FIT_MAX_DIM:
        raise ValueError(f"exhaustive fit capped at d={FIT_MAX_DIM}, got {d}")
    subsets = []
    for k in range(r + 1):
        subsets.extend(itertools.combinations(range(d), k))
    n = 1 << d
    design = np.empty((n, len(subsets)))
    y = np.empty(n)
    for mask in range(n):
        bits = [(mask >> i) & 1 for i in range(d)]
        for j, subset in enumerate(subsets):
            design[mask, j] = -1.0 if sum(bits[i] for i in subset) % 2 else 1.0
        y[mask] = target(BitString(d, mask))
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return coef


def true_lipschitz(fn, d: int) -> float:
    """max |fn(x) - fn(x with bit i flipped)| over the full cube."""
    if d > REGION_MAX_DIM:
        raise ValueError(f"exhaustive Lipschitz capped at d={REGION_MAX_DIM}, got {d}")
    values = [fn(BitString(d, mask)) for mask in range(1 << d)]
    best = 0.0
    for mask in range(1 << d):
        for i in range(d):
            diff = abs(values[mask] - values[mask ^ (1 << i)])
            if diff > best:
                best = diff
    return best


def exhaustive_safe_check(region, problem) -> list[tuple[BitString, int, float]]:
    """Every (point, constraint index, value) with a negative true safety
    value among points the region claims are safe."""
    d = region.d
    if d > REGION_MAX_DIM:
        raise ValueError(f"exhaustive region check capped at d={REGION_MAX_DIM}, got {d}")
    centers = [(int(mask), float(radius)) for mask, radius in
               zip(region.center_masks, region.radii)]
    violations = []
    for mask in range(1 << d):
        if not any((mask ^ cmask).bit_count() <= radius for cmask, radius in centers):
            continue
        x = BitString(d, mask)
        for j, fn in enumerate(problem.safety):
            v = fn(x)
            if v < 0:
                violations.append((x, j, v))
    return violations


def _likelihood(theta, mask: int, d: int) -> float:
    p = 1.0
    for i in range(d):
        p *= theta[i] if (mask >> i) & 1 else 1.0 - theta[i]
    return p


def exhaustive_projection(x: BitString, center: BitString, radius: float,
                          theta) -> tuple[BitString, int, float]:
    """Best in-ball point: minimal Hamming distance from x, then maximal
    likelihood under theta. Returns (point, distance, likelihood)."""
    d = x.d
    if d > PROJECTION_MAX_DIM:
        raise ValueError(f"exhaustive projection capped at d={PROJECTION_MAX_DIM}, got {d}")
    best = None
    for mask in range(1 << d):
        if (mask ^ center.mask).bit_count() > radius:
            continue
        dist = (mask ^ x.mask).bit_count()
        lik = _likelihood(theta, mask, d)
        key = (dist, -lik)
        if best is None or key < best[0]:
            best = (key, mask)
    if best is None:
        raise ValueError("ball is empty (negative radius)")
    (dist, neg_lik), mask = best
    return BitString(d, mask), dist, -neg_lik


def _report_fit_checks() -> list[OracleReport]:
    from . import walsh

    reports = []
    coef = exhaustive_fit(OBJECTIVES["onemax"], 3, 1)
    expected = np.array([1.5, -0.5, -0.5, -0.5])
    reports.append(OracleReport.compare(
        "fit-analytic", "onemax d=3 r=1 vs hand expansion",
        0.0, float(np.abs(coef - expected).max()), 1e-9))
    for name in ("onemax", "binval"):
        target = OBJECTIVES[name]
        d = 8
        oracle_coef = exhaustive_fit(target, d, 1)
        basis = walsh.enumerate_basis(d, 1)
        points = [(BitString(d, mask), target(BitString(d, mask))) for mask in range(1 << d)]
        impl_coef = walsh.fit(points, basis).coefficients
        reports.append(OracleReport.compare(
            "fit-equivalence", f"{name} d={d} r=1, full enumeration",
            0.0, float(np.abs(impl_coef - oracle_coef).max()), 1e-6))
    return reports


def _report_optimum_checks() -> list[OracleReport]:
    from .benchmarks import oracle_constrained_optimum

    reports = []
    for name in ("onemax", "leadingones", "binval", "revbinval"):
        for safety in ("compatible", "conflicting"):
            for d in (8, 12, 16):
                problem = make_problem(name, safety, d)
                oracle_best, _ = oracle_constrained_optimum(problem)
                reports.append(OracleReport.compare(
                    "constrained-optimum", f"{name} {safety} d={d}",
                    oracle_best, problem.known_optimum, 0.0))
    return reports


def _report_region_checks(rng: np.random.Generator) -> list[OracleReport]:
    from .safe_region import build_safe_region

    d = 10
    reports = []
    for safety_name, negative_control in (("compatible", False), ("conflicting", True)):
        problem = make_problem("onemax", safety_name, d)
        fn = problem.safety[0]
        l_true = true_lipschitz(fn, d)
        total_violations = 0
        control_violations = 0
        archives = 0
        while archives < 100:
            masks = rng.integers(0, 1 << d, size=rng.integers(1, 6))
            strict = [int(m) for m in masks if fn(BitString(d, int(m))) > 0]
            if not strict:
                continue
            archives += 1
            safety = np.array([[fn(BitString(d, m))] for m in strict])
            region = build_safe_region(d, np.array(strict, dtype=np.uint64), safety,
                                       np.array([l_true]))
            total_violations += len(exhaustive_safe_check(region, problem))
            if negative_control:
                doubled = build_safe_region(d, np.array(strict, dtype=np.uint64),
                                            2.0 * safety, np.array([l_true]))
                control_violations += len(exhaustive_safe_check(doubled, problem))
        reports.append(OracleReport.compare(
            "region-soundness", f"{safety_name} d={d}, 100 archives, true constant",
            0.0, float(total_violations), 0.0))
        if negative_control:
            reports.append(OracleReport.compare(
                "region-negative-control",
                f"{safety_name} d={d}, doubled radii yield violations",
                1.0, float(min(control_violations, 1)), 0.0))
    return reports


def _report_projection_checks(rng: np.random.Generator) -> list[OracleReport]:
    from .bernoulli import BernoulliParams
    from .safe_region import SafeRegion, project

    mismatches = 0
    instances = 200
    for _ in range(instances):
        d = int(rng.integers(6, 11))
        center = BitString(d, int(rng.integers(0, 1 << d)))
        x = BitString(d, int(rng.integers(0, 1 << d)))
        radius = float(rng.uniform(0.5, d / 2))
        theta = rng.uniform(1.0 / d, 1.0 - 1.0 / d, size=d)
        params = BernoulliParams(theta, 1.0 / d, 1.0 - 1.0 / d)
        region = SafeRegion(d=d, center_masks=np.array([center.mask], dtype=np.uint64),
                            center_safety=np.array([[radius]]), lhat=np.array([1.0]),
                            radii=np.array([radius]))
        got = project(x, region, params).x
        _, dist, lik = exhaustive_projection(x, center, radius, theta)
        got_dist = (got.mask ^ x.mask).bit_count()
        got_lik = _likelihood(theta, got.mask, d)
        inside = (got.mask ^ center.mask).bit_count() <= radius
        if not inside or got_dist != dist or abs(got_lik - lik) > 1e-12 * max(lik, 1e-300):
            mismatches += 1
    return [OracleReport.compare(
        "projection-optimality", f"{instances} random single-ball instances",
        0.0, float(mismatches), 0.0)]


def run_verification(seed: int = 2024) -> list[OracleReport]:
    rng = np.random.default_rng(seed)
    reports = []
    reports.extend(_report_fit_checks())
    reports.extend(_report_optimum_checks())
    reports.extend(_report_region_checks(rng))
    reports.extend(_report_projection_checks(rng))
    return reports


def format_report_table(reports: list[OracleReport]) -> str:
    lines = [f"{'check':<24} {'instance':<44} {'oracle':>12} {'impl':>12} "
             f"{'abs err':>10} {'status':>7}"]
    for r in reports:
        lines.append(f"{r.check:<24} {r.instance:<44} {r.oracle_value:>12.6g} "
                     f"{r.impl_value:>12.6g} {r.abs_err:>10.3g} "
                     f"{'ok' if r.passed else 'FAIL':>7}")
    return "\n".join(lines)
