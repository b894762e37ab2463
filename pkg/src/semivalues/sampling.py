"""Seeded sampling machinery shared by every estimator.

All randomness flows from numpy Generators derived from one root seed via
labeled SeedSequence splits, so each run is reproducible and internal streams
(size draws vs. coalition draws vs. game generation) stay independent.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb as _comb

import numpy as np

__all__ = [
    "substream",
    "AliasSampler",
    "uniform_fixed_size_subsets",
    "bernoulli_subsets",
    "random_permutations",
    "largest_remainder_counts",
    "pack_members",
    "members_to_masks",
]

# Labels for the per-purpose substreams of one run seed.
STREAM_SIZES = 1
STREAM_SUBSETS = 2
STREAM_MEASURE = 3
STREAM_GAME = 4

# Below this player count, uniform fixed-size coalitions are drawn by indexing
# a cached enumeration of all C(n, s) masks (one integer draw per sample).
_ENUM_MAX_N = 16


def substream(seed: int, label: int) -> np.random.Generator:
    """Generator for one labeled stream of a root seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(label)]))


class AliasSampler:
    """Walker/Vose alias table for O(1) categorical draws.

    Built once per run; `draw` consumes exactly two uniforms per sample, so
    the stream position is independent of the outcomes.
    """

    def __init__(self, probs):
        probs = np.asarray(probs, dtype=np.float64)
        if probs.ndim != 1 or len(probs) == 0:
            raise ValueError("alias table needs a nonempty 1-d probability vector")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("alias table needs finite nonnegative probabilities")
        total = probs.sum()
        if total <= 0:
            raise ValueError("alias table needs positive total mass")
        k = len(probs)
        scaled = probs * (k / total)
        accept = np.ones(k, dtype=np.float64)
        alias = np.arange(k, dtype=np.int64)
        small = [i for i in range(k) if scaled[i] < 1.0]
        large = [i for i in range(k) if scaled[i] >= 1.0]
        while small and large:
            lo = small.pop()
            hi = large.pop()
            accept[lo] = scaled[lo]
            alias[lo] = hi
            scaled[hi] -= 1.0 - scaled[lo]
            (small if scaled[hi] < 1.0 else large).append(hi)
        self.accept = accept
        self.alias = alias
        self.k = k

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        cells = rng.integers(0, self.k, size=count)
        keep = rng.random(count) < self.accept[cells]
        return np.where(keep, cells, self.alias[cells])


@lru_cache(maxsize=None)
def _mask_enumeration(n: int, s: int):
    """All size-s coalitions of [n]: (masks int64, membership bool) in lex order."""
    combos = list(combinations(range(n), s))
    masks = np.zeros(len(combos), dtype=np.int64)
    members = np.zeros((len(combos), n), dtype=bool)
    for row, combo in enumerate(combos):
        for i in combo:
            masks[row] |= 1 << i
        members[row, list(combo)] = True
    masks.setflags(write=False)
    members.setflags(write=False)
    return masks, members


def uniform_fixed_size_subsets(rng: np.random.Generator, n: int,
                               sizes: np.ndarray) -> np.ndarray:
    """Membership matrix of coalitions drawn uniformly at their given sizes.

    Row t is an exactly uniform draw from the size-sizes[t] coalitions of [n].
    All randomness is consumed row-aligned (one enumeration index or one key
    row per sample), so splitting a size sequence across calls draws exactly
    the same coalitions: batching never changes a run's sample stream.
    """
    sizes = np.asarray(sizes)
    count = len(sizes)
    members = np.zeros((count, n), dtype=bool)
    if count == 0:
        return members
    if sizes.min() < 0 or sizes.max() > n:
        raise ValueError("coalition sizes must lie in [0, n]")
    if n <= _ENUM_MAX_N:
        totals = np.array([_comb(n, s) for s in range(n + 1)], dtype=np.int64)
        picks = rng.integers(0, totals[sizes])
    else:
        keys = rng.random((count, n))
    order = np.argsort(sizes, kind="stable")
    sorted_sizes = sizes[order]
    cuts = np.searchsorted(sorted_sizes, np.arange(n + 2))
    for s in np.unique(sorted_sizes):
        rows = order[cuts[s]:cuts[s + 1]]
        if n <= _ENUM_MAX_N:
            _, table = _mask_enumeration(n, int(s))
            members[rows] = table[picks[rows]]
        elif s == n:
            members[rows] = True
        elif s > 0:
            idx = np.argpartition(keys[rows], s - 1, axis=1)[:, :s]
            members[rows[:, None], idx] = True
    return members


def bernoulli_subsets(rng: np.random.Generator, n: int, prob) -> np.ndarray:
    """Coalitions including each player independently; prob is scalar or per-row."""
    prob = np.asarray(prob, dtype=np.float64)
    count = 1 if prob.ndim == 0 else len(prob)
    u = rng.random((count, n))
    return u < (prob if prob.ndim == 0 else prob[:, None])


def random_permutations(rng: np.random.Generator, n: int, count: int) -> np.ndarray:
    """(count, n) uniform random permutations of range(n)."""
    return np.argsort(rng.random((count, n)), axis=1)


def largest_remainder_counts(total: int, probs: np.ndarray) -> np.ndarray:
    """Integer apportionment of `total` draws: |counts[j] - total*probs[j]| < 1."""
    probs = np.asarray(probs, dtype=np.float64)
    quota = total * probs / probs.sum()
    counts = np.floor(quota).astype(np.int64)
    short = total - int(counts.sum())
    if short > 0:
        remainders = quota - counts
        # ties broken toward lower index for determinism
        top = np.lexsort((np.arange(len(probs)), -remainders))[:short]
        counts[top] += 1
    return counts


def pack_members(members: np.ndarray) -> np.ndarray:
    """Pack a (B, n) membership matrix into (B, ceil(n/64)) uint64 words."""
    count, n = members.shape
    words = (n + 63) // 64
    padded = np.zeros((count, words * 64), dtype=bool)
    padded[:, :n] = members
    return np.packbits(padded, axis=1, bitorder="little").view(np.uint64)


def members_to_masks(members: np.ndarray) -> np.ndarray:
    """Bitmask integers (player i <-> bit i) for membership rows; needs n <= 62."""
    count, n = members.shape
    if n > 62:
        raise ValueError("int64 bitmasks support at most 62 players")
    return pack_members(members)[:, 0].astype(np.int64)
