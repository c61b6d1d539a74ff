"""Hot numeric kernels: numba-jitted versions with pure-numpy fallbacks.

Every kernel exists in two variants with identical signatures and outputs:
``*_np`` (vectorized numpy) and ``*_nb`` (numba ``@njit``). The dispatch
names (``walsh_design``, ``flip_deltas``, ``nearest_median_safety``) bind to
the numba variants when numba imports successfully and the environment
variable ``SAFE_ASNG_NUMBA`` is not set to ``0``; otherwise they bind to the
numpy fallbacks. ``scripts/bench_kernels.py`` times both paths.

Basis structure arguments are shared by both variants:
  members    flat int64 array of variable indices, all subsets concatenated
  offsets    int64 array of length m+1; subset j is members[offsets[j]:offsets[j+1]]
  membership (d, m) float64 indicator matrix, membership[i, j] = 1 iff i in subset j
"""

from __future__ import annotations

import os

import numpy as np

_flag = os.environ.get("SAFE_ASNG_NUMBA", "1").strip().lower()
_want_numba = _flag not in ("0", "false", "off")

if _want_numba:
    try:
        from numba import njit

        HAVE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a hard dependency
        HAVE_NUMBA = False
else:
    HAVE_NUMBA = False


# ---------------------------------------------------------------------------
# pure-numpy variants

def walsh_design_np(bits, members, offsets, membership):
    """Design matrix of +/-1 basis evaluations for n points.

    bits: (n, d) float64 of 0/1 values. Returns (n, m) float64.
    """
    counts = bits @ membership
    return 1.0 - 2.0 * np.mod(counts, 2.0)


def flip_deltas_np(phi, coef, members, offsets, membership):
    """Per-bit prediction change under a single-bit flip.

    For a Walsh expansion, flipping bit i negates every basis function
    whose subset contains i, so the prediction changes by
    -2 * sum_{S : i in S} w_S * phi_S(x). phi: (n, m) design rows of the
    unflipped points; returns (n, d) of prediction deltas.
    """
    return -2.0 * ((phi * coef) @ membership.T)


def nearest_median_safety_np(cand_masks, archive_masks, safety, inv_w):
    """Median safety values of each candidate's nearest archive entries.

    Distances are Hamming distance divided by a per-entry weight
    (inv_w = 1/w). All entries tied at the minimum contribute to the
    per-constraint median. Returns (n_candidates, p).
    """
    xor = cand_masks[:, None] ^ archive_masks[None, :]
    dva = np.bitwise_count(xor).astype(np.float64) * inv_w[None, :]
    at_min = dva == dva.min(axis=1)[:, None]
    k, p = cand_masks.size, safety.shape[1]
    med = np.empty((k, p))
    for j in range(p):
        vals = np.where(at_min, safety[:, j][None, :], np.nan)
        med[:, j] = np.nanmedian(vals, axis=1)
    return med


# ---------------------------------------------------------------------------
# numba variants

if HAVE_NUMBA:

    @njit(cache=True)
    def _popcount64(x):
        m1 = np.uint64(0x5555555555555555)
        m2 = np.uint64(0x3333333333333333)
        m4 = np.uint64(0x0F0F0F0F0F0F0F0F)
        h = np.uint64(0x0101010101010101)
        x = x - ((x >> np.uint64(1)) & m1)
        x = (x & m2) + ((x >> np.uint64(2)) & m2)
        x = (x + (x >> np.uint64(4))) & m4
        return (x * h) >> np.uint64(56)

    @njit(cache=True)
    def walsh_design_nb(bits, members, offsets, membership):
        n = bits.shape[0]
        m = offsets.shape[0] - 1
        out = np.empty((n, m))
        for k in range(n):
            for j in range(m):
                c = 0
                for t in range(offsets[j], offsets[j + 1]):
                    c += int(bits[k, members[t]])
                out[k, j] = 1.0 - 2.0 * (c & 1)
        return out

    @njit(cache=True)
    def flip_deltas_nb(phi, coef, members, offsets, membership):
        n, m = phi.shape
        d = membership.shape[0]
        out = np.zeros((n, d))
        for k in range(n):
            for j in range(m):
                v = coef[j] * phi[k, j]
                for t in range(offsets[j], offsets[j + 1]):
                    out[k, members[t]] += v
        return -2.0 * out

    @njit(cache=True)
    def nearest_median_safety_nb(cand_masks, archive_masks, safety, inv_w):
        k = cand_masks.shape[0]
        n = archive_masks.shape[0]
        p = safety.shape[1]
        med = np.empty((k, p))
        buf = np.empty(n)
        for c in range(k):
            dmin = np.inf
            for a in range(n):
                dva = _popcount64(cand_masks[c] ^ archive_masks[a]) * inv_w[a]
                if dva < dmin:
                    dmin = dva
            for j in range(p):
                cnt = 0
                for a in range(n):
                    dva = _popcount64(cand_masks[c] ^ archive_masks[a]) * inv_w[a]
                    if dva == dmin:
                        buf[cnt] = safety[a, j]
                        cnt += 1
                med[c, j] = np.median(buf[:cnt])
        return med

    walsh_design = walsh_design_nb
    flip_deltas = flip_deltas_nb
    nearest_median_safety = nearest_median_safety_nb
    ACTIVE_BACKEND = "numba"
else:
    walsh_design = walsh_design_np
    flip_deltas = flip_deltas_np
    nearest_median_safety = nearest_median_safety_np
    ACTIVE_BACKEND = "numpy"
