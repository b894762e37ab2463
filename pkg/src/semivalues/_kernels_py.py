"""Pure-numpy implementations of the hot kernels.

Same contracts as the compiled `_kernels` extension; selected automatically
when the extension is unavailable (see `backend`).  Sums are accumulated in
float64 either way, but reduction order differs from the C loops, so results
match the extension to ~1e-15 relative, not bitwise.
"""

from __future__ import annotations

import numpy as np

# Target temporary-array footprint of the chunked SOU evaluation.
_CHUNK_CELLS = 1 << 22


def sou_eval(term_words: np.ndarray, alphas: np.ndarray,
             subset_words: np.ndarray) -> np.ndarray:
    """Sum-of-unanimity utilities for a batch of coalitions.

    term_words: (d, W) uint64, subset_words: (B, W) uint64, alphas: (d,).
    Term j pays into row t iff every word of term j & ~subset t is zero.
    """
    d, words = term_words.shape
    count = subset_words.shape[0]
    out = np.empty(count, dtype=np.float64)
    step = max(1, _CHUNK_CELLS // max(1, d * words))
    for lo in range(0, count, step):
        hostile = ~subset_words[lo:lo + step]
        fits = (term_words[None, :, :] & hostile[:, None, :]) == 0
        if words > 1:
            fits = fits.all(axis=2)
        else:
            fits = fits[:, :, 0]
        out[lo:lo + step] = fits @ alphas
    return out


def accumulate_buckets(members: np.ndarray, sizes: np.ndarray,
                       values: np.ndarray,
                       plus_sum: np.ndarray, plus_cnt: np.ndarray,
                       minus_sum: np.ndarray, minus_cnt: np.ndarray) -> None:
    """Fold one batch of evaluated coalitions into per-(player, size) buckets.

    Every sample updates all n players: column sizes[t] of the plus buckets
    for members, of the minus buckets for non-members.
    """
    sizes = np.asarray(sizes)
    order = np.argsort(sizes, kind="stable")
    sorted_sizes = sizes[order]
    cut_at = np.nonzero(np.diff(sorted_sizes))[0] + 1
    for rows in np.split(order, cut_at):
        s = int(sizes[rows[0]])
        block = members[rows].astype(np.float64)
        v = values[rows]
        in_sum = block.T @ v
        in_cnt = block.sum(axis=0).astype(np.int64)
        plus_sum[:, s] += in_sum
        plus_cnt[:, s] += in_cnt
        minus_sum[:, s] += v.sum() - in_sum
        minus_cnt[:, s] += len(rows) - in_cnt
