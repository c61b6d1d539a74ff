"""Safe-region construction and projection of proposals into it.

Each archived safe point x_c spans a Hamming ball whose radius is its
margin min_j s_j(x_c) / Lhat_j: within that budget, a per-coordinate
Lipschitz bound Lhat_j guarantees no constraint can cross zero. Proposals
outside every ball are moved to the boundary of the nearest one by flipping
the bits whose flips cost the least sampling probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bernoulli import BernoulliParams
from .core import Archive, BitString

LHAT_EPS = 1e-12


class NoSafeCenterError(RuntimeError):
    """Raised when the archive holds no usable safe center."""


def estimate_lipschitz_raw(models, params: BernoulliParams, rng: np.random.Generator,
                           n_samples: int = 100) -> np.ndarray:
    """Largest single-bit-flip change of each surrogate, probed at n_samples
    draws from the current distribution (all d flips checked per draw)."""
    bits = params.sample_array(rng, n_samples)
    raw = np.zeros(len(models))
    phi_cache: dict[int, np.ndarray] = {}
    for j, model in enumerate(models):
        key = id(model.basis)
        if key not in phi_cache:
            phi_cache[key] = model.basis.design(bits)
        deltas = model.basis.flip_deltas(phi_cache[key], model.coefficients)
        raw[j] = float(np.abs(deltas).max())
    return raw


def inflate_small_data(raw: np.ndarray, n_data: int, t_data: int,
                       zeta: float = 10.0) -> np.ndarray:
    """Scale the estimates up while fewer than t_data points back the fit;
    the factor decays from zeta at n=0 to 1 at n=t_data."""
    if n_data < t_data:
        return raw * zeta ** (1.0 - n_data / t_data)
    return raw.copy()


def correct_degeneration(raw: np.ndarray, d0_safety) -> np.ndarray:
    """Cap each estimate by the best safety value seen among strictly safe
    points: a radius never needs to exceed the scale of observed margins.
    An empty set leaves the raw estimates untouched."""
    if d0_safety is None:
        return raw.copy()
    s = np.asarray(d0_safety, dtype=np.float64)
    if s.size == 0:
        return raw.copy()
    return np.minimum(raw, s.max(axis=0))


def select_d0_indices(archive: Archive, n_safe: int) -> np.ndarray:
    """Most recent n_safe archive positions with all safety values > 0."""
    s = archive.safety_view()
    return archive.select_recent_indices((s > 0).all(axis=1), n_safe)


def select_archives(archive: Archive, lhat: np.ndarray, n_safe: int,
                    d0_idx: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Archive positions of the margin archive D (s_j >= Lhat_j for all j)
    and the strictly-safe archive D0, each capped at the n_safe most recent.
    D falls back to D0 when empty; raises NoSafeCenterError when both are."""
    s = archive.safety_view()
    if d0_idx is None:
        d0_idx = select_d0_indices(archive, n_safe)
    d_idx = archive.select_recent_indices((s >= lhat[None, :]).all(axis=1), n_safe)
    if d_idx.size == 0:
        d_idx = d0_idx
    if d_idx.size == 0:
        raise NoSafeCenterError("archive holds no strictly safe point to center on")
    return d_idx, d0_idx


def center_radius(s_values, lhat: np.ndarray) -> float:
    """min_j s_j / Lhat_j, treating a vanishing Lhat_j as an unbounded term
    (that constraint is flat, so it never limits the ball)."""
    s = np.asarray(s_values, dtype=np.float64)
    if s.size == 0:
        return math.inf
    ratios = np.where(lhat > LHAT_EPS, s / np.where(lhat > LHAT_EPS, lhat, 1.0), math.inf)
    return float(ratios.min())


def signed_distance(x: BitString, x_safe: BitString, s_values, lhat: np.ndarray) -> float:
    """Hamming distance to the center minus the center's radius; <= 0 means
    x lies inside that center's ball."""
    return (x.mask ^ x_safe.mask).bit_count() - center_radius(s_values, lhat)


@dataclass
class SafeRegion:
    """Union of Hamming balls around archived safe centers, oldest first."""

    d: int
    center_masks: np.ndarray  # (k,) uint64
    center_safety: np.ndarray  # (k, p)
    lhat: np.ndarray  # (p,)
    radii: np.ndarray  # (k,)

    @property
    def n_centers(self) -> int:
        return int(self.center_masks.shape[0])

    def centers(self):
        for mask, radius in zip(self.center_masks, self.radii):
            yield BitString(self.d, int(mask)), float(radius)

    def contains(self, x: BitString) -> bool:
        dists = np.bitwise_count(self.center_masks ^ np.uint64(x.mask)).astype(np.float64)
        return bool((dists <= self.radii).any())


def build_safe_region(d: int, center_masks: np.ndarray, center_safety: np.ndarray,
                      lhat: np.ndarray) -> SafeRegion:
    masks = np.asarray(center_masks, dtype=np.uint64)
    safety = np.asarray(center_safety, dtype=np.float64)
    if masks.shape[0] == 0:
        raise NoSafeCenterError("cannot build a region with no centers")
    if safety.shape[1] and (lhat > LHAT_EPS).any():
        live = lhat > LHAT_EPS
        ratios = safety[:, live] / lhat[None, live]
        radii = ratios.min(axis=1)
    else:
        radii = np.full(masks.shape[0], math.inf)
    return SafeRegion(d=d, center_masks=masks, center_safety=safety,
                      lhat=np.asarray(lhat, dtype=np.float64), radii=radii)


@dataclass
class ProjectionResult:
    x: BitString          # final (possibly moved) solution
    moved: bool
    n_flip: int
    delta: float          # signed distance to the chosen center
    center_pos: int       # position of that center within the region arrays
    flip_order: np.ndarray  # differing-bit indices, best flip first
    diff_count: int


def project(x: BitString, region: SafeRegion, params: BernoulliParams) -> ProjectionResult:
    """Move x just inside the nearest ball if it is outside all of them.

    The nearest center minimizes signed distance, the most recent winning
    ties. ceil(distance) bits are flipped among those differing from that
    center, preferring flips that raise the sampling likelihood the most
    (lowest bit index on ties); the flip count is capped by the number of
    differing bits.
    """
    dists = np.bitwise_count(region.center_masks ^ np.uint64(x.mask)).astype(np.float64)
    deltas = dists - region.radii
    k = deltas.shape[0]
    pos = k - 1 - int(np.argmin(deltas[::-1]))  # last minimizer = most recent
    delta = float(deltas[pos])
    xor = x.mask ^ int(region.center_masks[pos])
    diff_count = xor.bit_count()
    if delta <= 0.0:
        return ProjectionResult(x=x, moved=False, n_flip=0, delta=delta, center_pos=pos,
                                flip_order=np.empty(0, dtype=np.int64), diff_count=diff_count)
    theta = params.theta
    xb = x.to_array()
    factors = np.where(xb == 1, theta, 1.0 - theta)
    p_x = factors.prod()
    p_flipped = p_x / factors * np.where(xb == 1, 1.0 - theta, theta)
    gain = p_flipped - p_x
    differing = np.array([(xor >> i) & 1 for i in range(x.d)], dtype=bool)
    gain = np.where(differing, gain, -np.inf)
    order = np.argsort(-gain, kind="stable")[:diff_count].astype(np.int64)
    n_flip = min(math.ceil(delta), diff_count)
    mask = x.mask
    for i in order[:n_flip]:
        mask ^= 1 << int(i)
    return ProjectionResult(x=BitString(x.d, mask), moved=True, n_flip=n_flip, delta=delta,
                            center_pos=pos, flip_order=order, diff_count=diff_count)


def repair_duplicate(result: ProjectionResult, existing) -> BitString:
    """Swap the worst applied flip for the next-ranked one when the projected
    solution duplicates an already-generated one. Solutions that were not
    projected, or whose flip budget consumed every differing bit, are
    returned unchanged; the single swap is not re-checked for collision."""
    x = result.x
    if x not in existing:
        return x
    if result.n_flip < 1 or result.n_flip >= result.diff_count:
        return x
    undo = int(result.flip_order[result.n_flip - 1])
    redo = int(result.flip_order[result.n_flip])
    return BitString(x.d, x.mask ^ (1 << undo) ^ (1 << redo))
