"""Bit strings, the Hamming metric, evaluation records, and archives.

Bit strings are packed into a single integer mask (bit i of the mask is
the i-th coordinate), which caps the dimension at 64 and makes Hamming
distances and archive lookups cheap. Archives additionally maintain
columnar numpy views (masks, objective, safety values, evaluation index)
so per-iteration selections stay vectorized.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

MAX_DIM = 64


class BitString:
    """Fixed-length binary vector, value-comparable and hashable."""

    __slots__ = ("d", "mask")

    def __init__(self, d: int, mask: int):
        if not 1 <= d <= MAX_DIM:
            raise ValueError(f"dimension must be in [1, {MAX_DIM}], got {d}")
        if not 0 <= mask < (1 << d):
            raise ValueError(f"mask {mask:#x} out of range for d={d}")
        self.d = d
        self.mask = mask

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> "BitString":
        mask = 0
        for i, b in enumerate(bits):
            if b not in (0, 1):
                raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
            mask |= int(b) << i
        return cls(len(bits), mask)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BitString":
        return cls.from_bits([int(round(v)) for v in np.asarray(arr).ravel()])

    @classmethod
    def from_string(cls, s: str) -> "BitString":
        return cls.from_bits([int(c) for c in s])

    def to_array(self, dtype=np.float64) -> np.ndarray:
        out = np.empty(self.d, dtype=dtype)
        for i in range(self.d):
            out[i] = (self.mask >> i) & 1
        return out

    def bit(self, i: int) -> int:
        return (self.mask >> i) & 1

    def flipped(self, i: int) -> "BitString":
        return BitString(self.d, self.mask ^ (1 << i))

    def ones(self) -> int:
        return self.mask.bit_count()

    def __len__(self) -> int:
        return self.d

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitString)
            and self.d == other.d
            and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.d, self.mask))

    def __repr__(self) -> str:
        return "".join(str((self.mask >> i) & 1) for i in range(self.d))


def hamming_distance(a: BitString, b: BitString) -> int:
    """Number of differing coordinates; raises on dimension mismatch."""
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: {a.d} vs {b.d}")
    return (a.mask ^ b.mask).bit_count()


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """(n, d) 0/1 rows -> (n,) uint64 masks (bit i of a mask = column i)."""
    b = np.asarray(bits)
    if b.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {b.shape}")
    if b.shape[1] > MAX_DIM:
        raise ValueError(f"row width {b.shape[1]} exceeds {MAX_DIM}")
    powers = np.left_shift(np.uint64(1), np.arange(b.shape[1], dtype=np.uint64))
    return (b.astype(np.uint64) * powers[None, :]).sum(axis=1, dtype=np.uint64)


@dataclass(frozen=True)
class EvaluatedSample:
    """A bit string with its objective value, safety values, and the
    global evaluation counter at first evaluation."""

    x: BitString
    f: float
    s: tuple
    eval_index: int

    def is_safe(self) -> bool:
        return all(v >= 0 for v in self.s)


class Archive:
    """Chronological archive of evaluated samples, unique by bit pattern.

    Insertion order equals first-evaluation order; re-inserting an
    existing pattern is a no-op (recency is never refreshed).
    """

    _INITIAL_CAPACITY = 64

    def __init__(self):
        self.entries: list[EvaluatedSample] = []
        self._by_mask: dict[int, int] = {}
        self._d: int | None = None
        self._p: int | None = None
        self._cap = 0
        self._masks = None
        self._f = None
        self._s = None
        self._eval_idx = None

    def _grow(self, cap: int):
        self._cap = cap
        masks = np.zeros(cap, dtype=np.uint64)
        f = np.zeros(cap, dtype=np.float64)
        s = np.zeros((cap, self._p), dtype=np.float64)
        eval_idx = np.zeros(cap, dtype=np.int64)
        n = len(self.entries)
        if n:
            masks[:n] = self._masks[:n]
            f[:n] = self._f[:n]
            s[:n] = self._s[:n]
            eval_idx[:n] = self._eval_idx[:n]
        self._masks, self._f, self._s, self._eval_idx = masks, f, s, eval_idx

    def insert(self, sample: EvaluatedSample) -> bool:
        """Append if the pattern is absent; returns whether it was inserted."""
        if self._d is None:
            self._d = sample.x.d
            self._p = len(sample.s)
            self._grow(self._INITIAL_CAPACITY)
        elif sample.x.d != self._d:
            raise ValueError(f"dimension mismatch: {sample.x.d} vs {self._d}")
        elif len(sample.s) != self._p:
            raise ValueError(f"safety arity mismatch: {len(sample.s)} vs {self._p}")
        if sample.x.mask in self._by_mask:
            return False
        if self.entries and sample.eval_index <= self.entries[-1].eval_index:
            raise ValueError("eval_index must increase with insertion order")
        n = len(self.entries)
        if n == self._cap:
            self._grow(2 * self._cap)
        self._masks[n] = sample.x.mask
        self._f[n] = sample.f
        self._s[n] = sample.s
        self._eval_idx[n] = sample.eval_index
        self._by_mask[sample.x.mask] = n
        self.entries.append(sample)
        return True

    def __contains__(self, x: BitString) -> bool:
        return x.mask in self._by_mask

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[EvaluatedSample]:
        return iter(self.entries)

    def __getitem__(self, i: int) -> EvaluatedSample:
        return self.entries[i]

    @property
    def d(self) -> int | None:
        return self._d

    @property
    def p(self) -> int | None:
        return self._p

    # Columnar views over the live prefix; do not hold across inserts.
    def masks_view(self) -> np.ndarray:
        return self._masks[: len(self.entries)]

    def f_view(self) -> np.ndarray:
        return self._f[: len(self.entries)]

    def safety_view(self) -> np.ndarray:
        return self._s[: len(self.entries)]

    def eval_index_view(self) -> np.ndarray:
        return self._eval_idx[: len(self.entries)]

    def select_recent(
        self,
        predicate: Callable[[EvaluatedSample], bool],
        n: int,
    ) -> list[EvaluatedSample]:
        """Up-to-n most recent entries satisfying predicate, chronological."""
        if n < 1:
            raise ValueError("n must be >= 1")
        picked = []
        for sample in reversed(self.entries):
            if predicate(sample):
                picked.append(sample)
                if len(picked) == n:
                    break
        picked.reverse()
        return picked

    def select_recent_indices(self, qualifies: np.ndarray, n: int) -> np.ndarray:
        """Vectorized variant: indices of the up-to-n most recent entries
        whose `qualifies` flag is set, in chronological order."""
        idx = np.flatnonzero(qualifies)
        return idx[-n:] if n < idx.size else idx
