"""Shared-sample-stream estimation of all probabilistic values at once.

One stream of sampled coalitions feeds per-(player, size) utility buckets:
for each sampled S, every player i updates the mean of U over size-|S|
coalitions containing i (if i is in S) or excluding i (otherwise).  Boundary
buckets come exactly from 2n+2 evaluations.  Any weight vector m then turns
the same buckets into an estimate via

    phi_i = sum_s m_s * (mean[i in R, |R|=s] - mean[i not in R, |R|=s-1]),

so reweighting costs zero additional utility evaluations.  The sampling
vector q over interior sizes {2..n-2} controls the convergence rate through
the functional D(m, q); `q_ofa_a` optimizes it for all weight vectors on
average and `q_ofa_s` for one specific m.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .games import Game, full_utility_table
from .sampling import (STREAM_SIZES, STREAM_SUBSETS, AliasSampler,
                       largest_remainder_counts, substream,
                       uniform_fixed_size_subsets)
from .traces import EstimateTrace, checkpoint_marks
from .weights import WeightVector

__all__ = [
    "SamplingVector",
    "BucketEstimates",
    "q_ofa_a",
    "q_ofa_s",
    "d_value",
    "d_value_arrays",
    "gamma_value",
    "mean_d",
    "sample_complexity_bound",
    "aggregate",
    "bucket_stream",
    "collect_bucket_trace",
    "run_ofa",
    "min_budget_per_player",
]

_BATCH = 8192


@dataclass(frozen=True)
class SamplingVector:
    """Positive probability vector over interior coalition sizes {2..n-2}.

    Entry j is the probability of drawing size j+2.  `origin` records how the
    vector was produced (ofa-a, ofa-s or custom) for trace metadata.
    """

    n: int
    q: np.ndarray
    origin: str = "custom"

    def __post_init__(self):
        q = np.asarray(self.q, dtype=np.float64)
        object.__setattr__(self, "q", q)
        if self.n < 4:
            raise ValueError(f"sampling vectors need n >= 4, got n={self.n}")
        if q.shape != (self.n - 3,):
            raise ValueError(f"expected {self.n - 3} size probabilities for "
                             f"n={self.n}, got shape {q.shape}")
        if np.any(q <= 0.0) or not np.all(np.isfinite(q)):
            raise ValueError("sampling probabilities must be strictly positive")
        if abs(q.sum() - 1.0) > 1e-12:
            raise ValueError(f"sampling probabilities sum to {q.sum()!r}, "
                             "expected 1 within 1e-12")
        q.setflags(write=False)

    @property
    def sizes(self) -> np.ndarray:
        return np.arange(2, self.n - 1)


def q_ofa_a(n: int) -> SamplingVector:
    """Size distribution minimizing the simplex-averaged D; q_s ~ 1/sqrt(s(n-s))."""
    if n < 5:
        raise ValueError(f"the averaged sampling vector needs n >= 5, got {n}")
    s = np.arange(2, n - 1, dtype=np.float64)
    q = 1.0 / np.sqrt(s * (n - s))
    return SamplingVector(n, q / q.sum(), origin="ofa-a")


def q_ofa_s(w: WeightVector) -> SamplingVector:
    """Size distribution minimizing D(m, .) for one specific weight vector."""
    n = w.n
    if n < 5:
        raise ValueError(f"the tuned sampling vector needs n >= 5, got {n}")
    s = np.arange(2, n - 1)
    with np.errstate(divide="ignore"):
        branch_in = 2.0 * w.log_m[s - 1] - np.log(s)
        branch_out = 2.0 * w.log_m[s] - np.log(n - s)
    log_q = 0.5 * np.logaddexp(branch_in, branch_out)
    top = log_q.max()
    if not np.isfinite(top):
        raise ValueError("all interior size weights are zero; no tuned "
                         "sampling vector exists")
    q = np.exp(log_q - top)
    # keep entries strictly positive even when m underflows many orders below
    q = np.maximum(q / q.sum(), 5e-324)
    return SamplingVector(n, q / q.sum(), origin="ofa-s")


def d_value_arrays(m, q) -> float:
    """D for raw arrays: sum_s (n/q_{s-1}) (m_s^2/s + m_{s+1}^2/(n-s)).

    No validation; `m` has length n, `q` length n-3.  Division happens inside
    the per-size term so zero mass with tiny q stays zero instead of NaN.
    """
    m = np.asarray(m, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    n = len(m)
    s = np.arange(2, n - 1, dtype=np.float64)
    inner = m[1:n - 2] ** 2 / s + m[2:n - 1] ** 2 / (n - s)
    return float(n * (inner / q).sum())


def d_value(w: WeightVector, q: SamplingVector) -> float:
    """Convergence functional D(m, q); smaller D means fewer evaluations."""
    if w.n != q.n:
        raise ValueError(f"dimension mismatch: weights n={w.n}, sampling n={q.n}")
    if np.any(q.q <= 0.0):
        raise ValueError("sampling probabilities must be strictly positive")
    return d_value_arrays(w.m, q.q)


def gamma_value(q: SamplingVector) -> float:
    """Minimum expected bucket-fill rate min_s q_{s-1} min(s, n-s)/n."""
    s = q.sizes
    return float(np.min(q.q * np.minimum(s, q.n - s) / q.n))


def mean_d(q: SamplingVector) -> float:
    """D averaged over the uniform simplex of weight vectors (closed form).

    Equals [2 / (n(n+1))] * sum_s (n/q_{s-1}) (1/s + 1/(n-s)); minimized
    exactly by `q_ofa_a` and bounded (below 2*pi^2) along that choice.
    """
    n = q.n
    s = np.arange(2, n - 1, dtype=np.float64)
    lead = 2.0 / (n * (n + 1.0))
    return float(lead * (n / q.q * (1.0 / s + 1.0 / (n - s))).sum())


def sample_complexity_bound(n: int, u: float, d: float,
                            epsilon: float, delta: float) -> float:
    """Evaluations guaranteeing P(||estimate - value||_2 >= epsilon) <= delta.

    4 n u^2 D / epsilon^2 * log(8 n^2 / delta).
    """
    if n < 1:
        raise ValueError("n must be positive")
    if u <= 0 or epsilon <= 0 or delta <= 0:
        raise ValueError("u, epsilon and delta must be positive")
    if d < 0:
        raise ValueError("D must be nonnegative")
    return 4.0 * n * u * u * d / (epsilon * epsilon) * math.log(8.0 * n * n / delta)


class BucketEstimates:
    """Running per-(player, size) utility means plus their exact boundary.

    Column s of `plus_*` covers coalitions of size s containing the player;
    column s of `minus_*` covers size-s coalitions excluding it.  Exact
    buckets hold their value in `plus_exact`/`minus_exact` (count treated as
    infinite); sampled buckets accumulate sums and counts, with mean 0 while
    empty, mirroring the estimator's zero initialization.
    """

    def __init__(self, n: int):
        self.n = n
        shape = (n, n + 1)
        self.plus_sum = np.zeros(shape)
        self.plus_cnt = np.zeros(shape, dtype=np.int64)
        self.minus_sum = np.zeros(shape)
        self.minus_cnt = np.zeros(shape, dtype=np.int64)
        self.plus_exact = np.full(shape, np.nan)
        self.minus_exact = np.full(shape, np.nan)

    def _mean(self, exact, total, cnt):
        out = np.zeros_like(total)
        np.divide(total, cnt, out=out, where=cnt > 0)
        hit = np.isfinite(exact)
        out[hit] = exact[hit]
        return out

    def plus_mean(self) -> np.ndarray:
        return self._mean(self.plus_exact, self.plus_sum, self.plus_cnt)

    def minus_mean(self) -> np.ndarray:
        return self._mean(self.minus_exact, self.minus_sum, self.minus_cnt)

    def plus_counts(self) -> np.ndarray:
        out = self.plus_cnt.astype(np.float64)
        out[np.isfinite(self.plus_exact)] = np.inf
        return out

    def minus_counts(self) -> np.ndarray:
        out = self.minus_cnt.astype(np.float64)
        out[np.isfinite(self.minus_exact)] = np.inf
        return out

    def copy(self) -> "BucketEstimates":
        dup = BucketEstimates(self.n)
        for name in ("plus_sum", "plus_cnt", "minus_sum", "minus_cnt",
                     "plus_exact", "minus_exact"):
            setattr(dup, name, getattr(self, name).copy())
        return dup

    def merge(self, other: "BucketEstimates") -> "BucketEstimates":
        """Count-weighted mean merge; associative and commutative."""
        if other.n != self.n:
            raise ValueError("cannot merge buckets of different player counts")
        for mine, theirs in ((self.plus_exact, other.plus_exact),
                             (self.minus_exact, other.minus_exact)):
            both = np.isfinite(mine) & np.isfinite(theirs)
            if not np.allclose(mine[both], theirs[both], rtol=0, atol=0,
                               equal_nan=True):
                raise ValueError("exact buckets disagree; the runs come from "
                                 "different games")
        out = self.copy()
        out.plus_sum += other.plus_sum
        out.plus_cnt += other.plus_cnt
        out.minus_sum += other.minus_sum
        out.minus_cnt += other.minus_cnt
        for name in ("plus_exact", "minus_exact"):
            mine = getattr(out, name)
            theirs = getattr(other, name)
            fill = np.isnan(mine) & np.isfinite(theirs)
            mine[fill] = theirs[fill]
        return out


def aggregate(buckets: BucketEstimates, w: WeightVector) -> np.ndarray:
    """Convert buckets into the value estimate under one weight vector.

    Reads stored means only: aggregating the same buckets under any number of
    weight vectors consumes zero additional utility evaluations.
    """
    if w.n != buckets.n:
        raise ValueError(f"weights are for n={w.n}, buckets for n={buckets.n}")
    plus = buckets.plus_mean()
    minus = buckets.minus_mean()
    return (plus[:, 1:] - minus[:, :-1]) @ w.m


def min_budget_per_player(n: int) -> int:
    """Smallest admissible per-player budget (covers the exact phase)."""
    if n <= 4:
        return -(-(1 << n) // n)
    return -(-(2 * n + 2) // n)


def _exact_phase_members(n: int) -> np.ndarray:
    members = np.zeros((2 * n + 2, n), dtype=bool)
    members[1] = True
    members[2:2 + n] = np.eye(n, dtype=bool)
    members[2 + n:] = ~np.eye(n, dtype=bool)
    return members


def _fill_exact_phase(buckets: BucketEstimates, values: np.ndarray) -> None:
    n = buckets.n
    u_empty = values[0]
    u_full = values[1]
    u_single = values[2:2 + n]
    u_drop = values[2 + n:]
    buckets.minus_exact[:, 0] = u_empty
    buckets.plus_exact[:, n] = u_full
    buckets.plus_exact[:, 1] = u_single
    buckets.minus_exact[:, n - 1] = u_drop
    buckets.minus_exact[:, 1] = (u_single.sum() - u_single) / (n - 1)
    buckets.plus_exact[:, n - 1] = (u_drop.sum() - u_drop) / (n - 1)


def _exact_buckets_from_table(n: int, table: np.ndarray) -> BucketEstimates:
    buckets = BucketEstimates(n)
    masks = np.arange(1 << n, dtype=np.int64)
    pops = np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)
    for s in range(n + 1):
        rows = masks[pops == s]
        vals = table[rows]
        inside = ((rows[:, None] >> np.arange(n)[None, :]) & 1).astype(bool)
        hit = inside.sum(axis=0)
        plus = inside.T @ vals
        if s >= 1:
            buckets.plus_exact[:, s] = plus / hit
        if s <= n - 1:
            buckets.minus_exact[:, s] = (vals.sum() - plus) / (len(rows) - hit)
    return buckets


def _stratified_size_sequence(sizes: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Round-robin interleaving: pass k emits every size with count > k."""
    reps = np.repeat(sizes, counts)
    pass_index = np.concatenate([np.arange(c) for c in counts]) \
        if len(counts) else np.empty(0, dtype=np.int64)
    return reps[np.lexsort((reps, pass_index))]


def bucket_stream(game: Game, q: SamplingVector | None, budget_per_player: int,
                  checkpoints: int, seed: int, allocation: str = "stochastic"):
    """Run the sampling phases, yielding (evals_total, live buckets) at marks.

    The yielded BucketEstimates is the live accumulator: consumers must copy
    it if they keep it.  For n <= 4 the sampling phase degenerates and all
    buckets come from full enumeration (one mark).
    """
    n = game.n
    if budget_per_player < min_budget_per_player(n):
        raise ValueError(f"budget_per_player={budget_per_player} is below the "
                         f"exact-phase floor {min_budget_per_player(n)}")
    if allocation not in ("stochastic", "stratified"):
        raise ValueError(f"unknown allocation mode {allocation!r}")
    if n <= 4:
        buckets = _exact_buckets_from_table(n, full_utility_table(game))
        yield (1 << n), buckets
        return
    if q is None:
        raise ValueError("a sampling vector is required for n >= 5")
    if q.n != n:
        raise ValueError(f"sampling vector is for n={q.n}, game has n={n}")
    total = budget_per_player * n
    exact_cost = 2 * n + 2
    marks = checkpoint_marks(total, checkpoints, floor=exact_cost)

    buckets = BucketEstimates(n)
    _fill_exact_phase(buckets, game.evaluate_many(_exact_phase_members(n)))

    draws = total - exact_cost
    rng_sizes = substream(seed, STREAM_SIZES)
    rng_subsets = substream(seed, STREAM_SUBSETS)
    if allocation == "stochastic":
        picks = AliasSampler(q.q).draw(rng_sizes, draws)
        sizes = (picks + 2).astype(np.int64)
    else:
        counts = largest_remainder_counts(draws, q.q)
        sizes = _stratified_size_sequence(q.sizes.astype(np.int64), counts)

    done = 0
    for mark in marks:
        while done < mark - exact_cost:
            take = min(mark - exact_cost - done, _BATCH)
            batch_sizes = sizes[done:done + take]
            members = uniform_fixed_size_subsets(rng_subsets, n, batch_sizes)
            values = game.evaluate_many(members)
            backend.accumulate_buckets(members, batch_sizes, values,
                                       buckets.plus_sum, buckets.plus_cnt,
                                       buckets.minus_sum, buckets.minus_cnt)
            done += take
        yield mark, buckets


def collect_bucket_trace(game, q, budget_per_player, checkpoints, seed,
                         allocation: str = "stochastic"):
    """Materialized (evals_total, BucketEstimates) snapshots at every mark."""
    return [(evals, buckets.copy())
            for evals, buckets in bucket_stream(game, q, budget_per_player,
                                                checkpoints, seed, allocation)]


def run_ofa(game: Game, w: WeightVector, q: SamplingVector | None,
            budget_per_player: int, checkpoints: int, seed: int,
            allocation: str = "stochastic",
            semivalue: str = "custom") -> EstimateTrace:
    """One full run: sample once, aggregate under `w` at every checkpoint."""
    meter = game.meter()
    points = [(evals, aggregate(buckets, w))
              for evals, buckets in bucket_stream(game, q, budget_per_player,
                                                  checkpoints, seed, allocation)]
    meta = {
        "mode": allocation,
        "q_origin": q.origin if q is not None else "exact",
        "budget_per_player": budget_per_player,
        "evals_consumed": meter.count,
    }
    return EstimateTrace(estimator="ofa", semivalue=semivalue, seed=seed,
                         n=game.n, checkpoints=points, meta=meta)
