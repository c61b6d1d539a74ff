"""Discrete Walsh basis and least-squares surrogates on binary inputs.

A basis of order R holds every variable subset of size <= R (including the
empty subset), ordered by size then lexicographically, so coefficient
vectors are comparable across runs. Fits go through the normal equations;
an incremental cache accumulates Gram/moment sums so per-iteration refits
cost O(m^2) ingest + O(m^3) solve regardless of archive size.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import _kernels
from .core import MAX_DIM, BitString

BASIS_COUNT_CAP = 100_000
RIDGE_JITTER = 1e-8  # scaled by the ingested point count
_EIG_FLOOR = 1e-12


def walsh_eval(subset_mask: int, x: BitString) -> float:
    """(-1)^(number of set bits of x within the subset); empty subset -> +1."""
    return -1.0 if (subset_mask & x.mask).bit_count() & 1 else 1.0


class WalshBasis:
    """All variable subsets of size <= r over d variables, in fixed order."""

    def __init__(self, d: int, r: int, subsets: list[tuple[int, ...]]):
        self.d = d
        self.r = r
        self.subsets = subsets
        self.m = len(subsets)
        self.masks = np.array(
            [sum(1 << i for i in s) for s in subsets], dtype=np.uint64
        )
        members = []
        offsets = [0]
        for s in subsets:
            members.extend(s)
            offsets.append(len(members))
        self.members = np.array(members, dtype=np.int64)
        self.offsets = np.array(offsets, dtype=np.int64)
        self.membership = np.zeros((d, self.m), dtype=np.float64)
        for j, s in enumerate(subsets):
            for i in s:
                self.membership[i, j] = 1.0

    def design(self, bits: np.ndarray) -> np.ndarray:
        """(n, m) matrix of basis evaluations for (n, d) 0/1 rows."""
        bits = np.ascontiguousarray(bits, dtype=np.float64)
        return _kernels.walsh_design(bits, self.members, self.offsets, self.membership)

    def design_row(self, x: BitString) -> np.ndarray:
        parity = (np.bitwise_count(self.masks & np.uint64(x.mask)) & 1).astype(np.float64)
        return 1.0 - 2.0 * parity

    def flip_deltas(self, phi: np.ndarray, coef: np.ndarray) -> np.ndarray:
        """(n, d) change in prediction from flipping each bit of each point."""
        return _kernels.flip_deltas(phi, coef, self.members, self.offsets, self.membership)


def enumerate_basis(d: int, r: int, cap: int = BASIS_COUNT_CAP) -> WalshBasis:
    if not 0 <= r <= d:
        raise ValueError(f"order must satisfy 0 <= r <= d, got r={r}, d={d}")
    if d > MAX_DIM:
        raise ValueError(f"d must be <= {MAX_DIM}, got {d}")
    count = 0
    subsets: list[tuple[int, ...]] = []
    for k in range(r + 1):
        for combo in itertools.combinations(range(d), k):
            count += 1
            if count > cap:
                raise ValueError(
                    f"basis for d={d}, r={r} exceeds the cap of {cap} functions"
                )
            subsets.append(combo)
    return WalshBasis(d, r, subsets)


@dataclass
class WalshModel:
    basis: WalshBasis
    coefficients: np.ndarray

    def predict(self, x: BitString) -> float:
        return float(self.basis.design_row(x) @ self.coefficients)

    def predict_batch(self, bits: np.ndarray) -> np.ndarray:
        return self.basis.design(bits) @ self.coefficients

    def dump(self) -> str:
        """One line per basis function: subset members -> coefficient."""
        lines = []
        for subset, w in zip(self.basis.subsets, self.coefficients):
            key = ",".join(str(i) for i in subset) if subset else "-"
            lines.append(f"{key} : {float(w)!r}")
        return "\n".join(lines)


def _spd_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    try:
        factor = scipy.linalg.cho_factor(a, lower=True, check_finite=False)
        return scipy.linalg.cho_solve(factor, b, check_finite=False)
    except scipy.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(a)
        floor = _EIG_FLOOR * max(float(vals[-1]), 1.0)
        vals = np.maximum(vals, floor)
        return vecs @ ((vecs.T @ b) / vals[:, None] if b.ndim == 2 else (vecs.T @ b) / vals)


def _solve_normal_equations(gram: np.ndarray, moment: np.ndarray, n: int) -> np.ndarray:
    """Coefficients from accumulated Gram/moment sums of n points.

    Rank-deficient systems (n < m, or a failed factorization) get a ridge
    jitter of RIDGE_JITTER * n on the Gram diagonal so the solution is
    determinate and stable as the diagonal grows.
    """
    m = gram.shape[0]
    if n < 1:
        raise ValueError("need at least one ingested point")
    if n < m:
        a = gram + (RIDGE_JITTER * n) * np.eye(m)
        return _spd_solve(a, moment)
    try:
        factor = scipy.linalg.cho_factor(gram, lower=True, check_finite=False)
        return scipy.linalg.cho_solve(factor, moment, check_finite=False)
    except scipy.linalg.LinAlgError:
        a = gram + (RIDGE_JITTER * n) * np.eye(m)
        return _spd_solve(a, moment)


class NormalEquationsCache:
    """Accumulated normal equations for incremental refits.

    One Gram matrix is shared across n_targets regression targets (all
    targets are observed on the same points), with one moment vector per
    target. solve() matches a batch fit on the ingested points.
    """

    def __init__(self, basis: WalshBasis, n_targets: int = 1):
        self.basis = basis
        self.n_targets = n_targets
        self.gram = np.zeros((basis.m, basis.m))
        self.moment = np.zeros((basis.m, n_targets))
        self.n = 0

    def ingest(self, x: BitString, y) -> None:
        y = np.atleast_1d(np.asarray(y, dtype=np.float64))
        if y.shape != (self.n_targets,):
            raise ValueError(f"expected {self.n_targets} target values, got {y.shape}")
        phi = self.basis.design_row(x)
        self.gram += np.outer(phi, phi)
        self.moment += phi[:, None] * y[None, :]
        self.n += 1

    def solve(self) -> list[WalshModel]:
        coef = _solve_normal_equations(self.gram, self.moment, self.n)
        return [WalshModel(self.basis, coef[:, t].copy()) for t in range(self.n_targets)]


def fit(points, basis: WalshBasis) -> WalshModel:
    """Batch least-squares fit of (BitString, value) pairs."""
    points = list(points)
    if not points:
        raise ValueError("need at least one data point")
    bits = np.array([x.to_array() for x, _ in points])
    y = np.array([v for _, v in points], dtype=np.float64)
    phi = basis.design(bits)
    gram = phi.T @ phi
    moment = phi.T @ y
    coef = _solve_normal_equations(gram, moment[:, None], len(points))
    return WalshModel(basis, coef[:, 0])
