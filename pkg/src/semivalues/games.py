"""Cooperative games: utility functions, generators, exact oracles, accounting.

A game is a pure function from coalitions of [n] to reals plus a monotone
counter of utility evaluations (the budget axis every estimator is measured
on).  Coalitions are boolean membership rows internally; the scalar API also
accepts integer bitmasks (player i <-> bit i-1, matching the table file
format).
"""

from __future__ import annotations

import csv
import json
import threading
from pathlib import Path

import numpy as np

from . import backend
from .sampling import (STREAM_GAME, members_to_masks, pack_members, substream,
                       uniform_fixed_size_subsets)
from .weights import SemivalueSpec, SpecError, WeightVector, moment

__all__ = [
    "GameError",
    "Game",
    "MemoGame",
    "EvalMeter",
    "TableGame",
    "SOUGame",
    "sou_generate",
    "full_utility_table",
    "exact_semivalue_sou",
    "exact_semivalue_bruteforce",
]

BRUTE_FORCE_MAX_N = 25


class GameError(ValueError):
    """Malformed game, out-of-range coalition, or violated utility bound."""


class EvalMeter:
    """A run's view of a game's evaluation counter: reports the delta."""

    def __init__(self, game: "Game"):
        self._game = game
        self._start = game.eval_count

    @property
    def count(self) -> int:
        return self._game.eval_count - self._start


class Game:
    """Base utility function over coalitions of [n].

    Subclasses implement `_values` (pure, vectorized).  `evaluate` and
    `evaluate_many` meter every call and enforce the sup-norm bound when one
    is declared.
    """

    def __init__(self, n: int, u_bound: float | None = None):
        if n < 1:
            raise GameError(f"player count must be >= 1, got {n}")
        self.n = n
        self.u_bound = u_bound
        self._evals = 0
        self._lock = threading.Lock()

    def _values(self, members: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _coerce(self, subset) -> np.ndarray:
        if isinstance(subset, (int, np.integer)):
            mask = int(subset)
            if mask < 0 or mask >> self.n:
                raise GameError(f"bitmask {subset} out of range for n={self.n}")
            bits = np.arange(self.n)
            return ((mask >> bits) & 1).astype(bool)[None, :]
        members = np.asarray(subset, dtype=bool)
        if members.shape != (self.n,):
            raise GameError(f"expected {self.n} membership flags, "
                            f"got shape {members.shape}")
        return members[None, :]

    def evaluate(self, subset) -> float:
        """Utility of one coalition (int bitmask or boolean membership row)."""
        return float(self.evaluate_many(self._coerce(subset))[0])

    def evaluate_many(self, members: np.ndarray) -> np.ndarray:
        """Utilities of a (B, n) batch; counts B evaluations."""
        members = np.asarray(members, dtype=bool)
        if members.ndim != 2 or members.shape[1] != self.n:
            raise GameError(f"expected a (batch, {self.n}) membership matrix")
        values = self._values(members)
        if self.u_bound is not None and len(values):
            worst = float(np.max(np.abs(values)))
            if worst > self.u_bound * (1.0 + 1e-12) + 1e-300:
                raise GameError(f"utility {worst} exceeds declared bound "
                                f"{self.u_bound}")
        with self._lock:
            self._evals += len(values)
        return values

    @property
    def eval_count(self) -> int:
        return self._evals

    def meter(self) -> EvalMeter:
        return EvalMeter(self)


class MemoGame(Game):
    """Opt-in per-run memo over a base game; only cache misses are metered.

    Used by chain-walking estimators for coalitions they provably revisit.
    """

    def __init__(self, base: Game):
        super().__init__(base.n, base.u_bound)
        self._base = base
        self._cache: dict[bytes, float] = {}

    def _values(self, members: np.ndarray) -> np.ndarray:
        raise NotImplementedError  # evaluation is routed through the cache

    def evaluate_many(self, members: np.ndarray) -> np.ndarray:
        members = np.asarray(members, dtype=bool)
        if members.ndim != 2 or members.shape[1] != self.n:
            raise GameError(f"expected a (batch, {self.n}) membership matrix")
        out = np.empty(len(members), dtype=np.float64)
        fresh_rows = []
        keys = [row.tobytes() for row in members]
        for t, key in enumerate(keys):
            hit = self._cache.get(key)
            if hit is None:
                fresh_rows.append(t)
            else:
                out[t] = hit
        if fresh_rows:
            fresh = self._base.evaluate_many(members[fresh_rows])
            for t, value in zip(fresh_rows, fresh):
                out[t] = value
                self._cache[keys[t]] = float(value)
        return out

    @property
    def eval_count(self) -> int:
        return self._base.eval_count

    def meter(self) -> EvalMeter:
        return EvalMeter(self._base)


class TableGame(Game):
    """Exhaustive utility table over all 2^n coalitions (n <= 25)."""

    def __init__(self, table, u_bound: float | None = None):
        table = np.asarray(table, dtype=np.float64)
        n = int(round(np.log2(len(table))))
        if len(table) != (1 << n) or n < 1:
            raise GameError(f"table length {len(table)} is not a power of two")
        if n > BRUTE_FORCE_MAX_N:
            raise GameError(f"table games support n <= {BRUTE_FORCE_MAX_N}")
        super().__init__(n, u_bound)
        self.table = table
        self.table.setflags(write=False)

    def _values(self, members: np.ndarray) -> np.ndarray:
        return self.table[members_to_masks(members)]

    def save(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["mask", "utility"])
            for mask, value in enumerate(self.table):
                writer.writerow([mask, repr(float(value))])

    @classmethod
    def load(cls, path) -> "TableGame":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["mask", "utility"]:
                raise GameError(f"{path}: expected header mask,utility")
            pairs = [(int(mask), float(value)) for mask, value in reader]
        size = len(pairs)
        table = np.empty(size, dtype=np.float64)
        seen = np.zeros(size, dtype=bool)
        for mask, value in pairs:
            if not 0 <= mask < size or seen[mask]:
                raise GameError(f"{path}: bad or duplicate mask {mask}")
            table[mask] = value
            seen[mask] = True
        return cls(table)


class SOUGame(Game):
    """Sum-of-unanimity utility: U(S) = sum_j alpha_j * [S_j subset of S].

    Semi-values have a closed form through the measure moments, so exact
    values cost d term scans instead of 2^n evaluations.
    """

    def __init__(self, n: int, term_members: np.ndarray, alphas: np.ndarray,
                 seed: int | None = None):
        term_members = np.asarray(term_members, dtype=bool)
        alphas = np.asarray(alphas, dtype=np.float64)
        if term_members.ndim != 2 or term_members.shape[1] != n:
            raise GameError("term membership matrix must be (d, n)")
        if len(alphas) != len(term_members):
            raise GameError("one coefficient per unanimity term required")
        sizes = term_members.sum(axis=1)
        if np.any(sizes == 0) or np.any(sizes == n):
            raise GameError("unanimity terms must be nonempty proper subsets")
        super().__init__(n, u_bound=float(np.abs(alphas).sum()))
        self.term_members = term_members
        self.alphas = alphas
        self.term_sizes = sizes.astype(np.int64)
        self.seed = seed
        self._term_words = pack_members(term_members)

    @property
    def d(self) -> int:
        return len(self.alphas)

    def _values(self, members: np.ndarray) -> np.ndarray:
        return backend.sou_eval(self._term_words, self.alphas,
                                pack_members(members))

    def save(self, path):
        terms = [{"players": sorted(int(i) + 1 for i in np.nonzero(row)[0]),
                  "alpha": float(a)}
                 for row, a in zip(self.term_members, self.alphas)]
        doc = {"n": self.n, "d": self.d, "seed": self.seed, "terms": terms}
        Path(path).write_text(json.dumps(doc, indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "SOUGame":
        doc = json.loads(Path(path).read_text())
        n = int(doc["n"])
        terms = doc["terms"]
        members = np.zeros((len(terms), n), dtype=bool)
        alphas = np.empty(len(terms))
        for j, term in enumerate(terms):
            players = [int(i) - 1 for i in term["players"]]
            if any(i < 0 or i >= n for i in players):
                raise GameError(f"{path}: player out of range in term {j}")
            members[j, players] = True
            alphas[j] = float(term["alpha"])
        return cls(n, members, alphas, seed=doc.get("seed"))


def sou_generate(n: int, d: int, seed: int) -> SOUGame:
    """Random SOU game, reproducible bit-for-bit from (n, d, seed).

    Term subsets are drawn by picking a size uniformly from {1..n-1} and then
    a subset of that size uniformly; coefficients are i.i.d. Uniform(-1, 1).
    """
    if n < 2:
        raise GameError(f"SOU games need n >= 2, got {n}")
    if d < 1:
        raise GameError(f"SOU games need d >= 1, got {d}")
    rng = substream(seed, STREAM_GAME)
    sizes = rng.integers(1, n, size=d)
    members = uniform_fixed_size_subsets(rng, n, sizes)
    alphas = rng.uniform(-1.0, 1.0, size=d)
    return SOUGame(n, members, alphas, seed=seed)


def full_utility_table(game: Game) -> np.ndarray:
    """U over all 2^n coalitions (indexed by bitmask); costs 2^n evaluations."""
    n = game.n
    if n > BRUTE_FORCE_MAX_N:
        raise GameError(f"full enumeration refuses n > {BRUTE_FORCE_MAX_N}")
    masks = np.arange(1 << n, dtype=np.int64)
    out = np.empty(1 << n, dtype=np.float64)
    step = 1 << 14
    bits = np.arange(n, dtype=np.int64)
    for lo in range(0, 1 << n, step):
        chunk = masks[lo:lo + step]
        members = ((chunk[:, None] >> bits[None, :]) & 1).astype(bool)
        out[lo:lo + step] = game.evaluate_many(members)
    return out


def exact_semivalue_sou(game: SOUGame, spec: SemivalueSpec) -> np.ndarray:
    """Closed-form semi-values of an SOU game; consumes no utility evaluations.

    phi_i = sum over terms containing i of alpha_j * moment(spec, s_j - 1).
    """
    if not isinstance(game, SOUGame):
        raise GameError("closed-form oracle requires an SOU game")
    top = int(game.term_sizes.max())
    moments = np.array([moment(spec, k) for k in range(top)])  # raises on Custom
    scaled = game.alphas * moments[game.term_sizes - 1]
    return scaled @ game.term_members


def exact_semivalue_bruteforce(game: Game, w: WeightVector,
                               table: np.ndarray | None = None) -> np.ndarray:
    """Exact probabilistic value by full enumeration (n <= 25).

    Enumerates the utility table once (memoized across players within the
    call; pass `table` to reuse one across weight vectors) and folds the
    weighted marginal contributions.
    """
    n = game.n
    if n > BRUTE_FORCE_MAX_N:
        raise GameError(f"brute force refuses n > {BRUTE_FORCE_MAX_N}: "
                        "exponential enumeration")
    if w.n != n:
        raise GameError(f"weight vector is for n={w.n}, game has n={n}")
    if table is None:
        table = full_utility_table(game)
    masks = np.arange(1 << n, dtype=np.int64)
    pops = np.bitwise_count(masks.astype(np.uint64)).astype(np.int64)
    phi = np.empty(n, dtype=np.float64)
    for i in range(n):
        without = masks[((masks >> i) & 1) == 0]
        weights = w.p[pops[without]]  # p_{|S|+1} = p[pop] zero-indexed
        phi[i] = weights @ (table[without | (1 << i)] - table[without])
    return phi
