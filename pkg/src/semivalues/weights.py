"""Per-size weight kernels for probabilistic values.

Every probabilistic value over ``n`` players is determined by a nonnegative
vector ``p`` with ``sum_s C(n-1, s-1) * p_s == 1``; the attribution of player
``i`` is ``sum_{S not containing i} p_{|S|+1} * (U(S+i) - U(S))``.  Semi-values
are the subfamily whose ``p`` comes from a probability measure on [0, 1]:
``p_s = integral w^(s-1) (1-w)^(n-s) dmu(w)``.  This module builds the ``p``
and ``m_s = C(n-1, s-1) * p_s`` vectors (in log space, stable up to n = 1024)
and the raw moments of the underlying measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.special import betaln, gammaln

__all__ = [
    "SpecError",
    "BetaShapley",
    "WeightedBanzhaf",
    "Custom",
    "SemivalueSpec",
    "SHAPLEY",
    "WeightVector",
    "make_weights",
    "moment",
    "normalize_custom",
    "parse_semivalue",
    "semivalue_label",
]

NORMALIZATION_TOL = 1e-9


class SpecError(ValueError):
    """Invalid or out-of-range semi-value specification."""


@dataclass(frozen=True)
class BetaShapley:
    """Beta-kernel semi-value; (1, 1) is the Shapley value.

    The measure is the Beta distribution with density proportional to
    w^(beta-1) (1-w)^(alpha-1), normalized to unit mass.  alpha, beta >= 1 is
    the practical range (bounded density).
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha >= 1.0 and self.beta >= 1.0):
            raise SpecError(f"BetaShapley requires alpha, beta >= 1, got "
                            f"({self.alpha}, {self.beta})")

    @property
    def is_shapley(self) -> bool:
        return self.alpha == 1.0 and self.beta == 1.0


@dataclass(frozen=True)
class WeightedBanzhaf:
    """Point-mass semi-value: each player joins a coalition with probability a."""

    a: float

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise SpecError(f"WeightedBanzhaf requires 0 < a < 1, got {self.a}")


@dataclass(frozen=True)
class Custom:
    """Explicit per-size weights for a fixed player count n = len(p).

    The vector is validated, never silently rescaled; use
    :func:`normalize_custom` for explicit normalization.
    """

    p: tuple[float, ...]

    def __post_init__(self):
        if len(self.p) == 0:
            raise SpecError("Custom weight vector is empty")
        if any(v < 0.0 or not np.isfinite(v) for v in self.p):
            raise SpecError("Custom weights must be finite and nonnegative")


SemivalueSpec = BetaShapley | WeightedBanzhaf | Custom

SHAPLEY = BetaShapley(1.0, 1.0)


@dataclass(frozen=True)
class WeightVector:
    """Size weights of one probabilistic value at a fixed n.

    ``p[s-1]`` weighs coalitions of size s in the marginal-contribution sum;
    ``m[s-1] = C(n-1, s-1) * p[s-1]`` is the induced distribution over sizes
    (sums to one, every entry in [0, 1] -- no amplifying scalars).  ``log_p``
    and ``log_m`` carry the same information without underflow and are what
    size-distribution consumers should use at large n.
    """

    n: int
    p: np.ndarray
    m: np.ndarray
    log_p: np.ndarray
    log_m: np.ndarray

    def __post_init__(self):
        for arr in (self.p, self.m, self.log_p, self.log_m):
            arr.setflags(write=False)


def _log_binom(n, k):
    return gammaln(n + 1.0) - gammaln(k + 1.0) - gammaln(n - k + 1.0)


def _log_p(spec: SemivalueSpec, n: int) -> np.ndarray:
    s = np.arange(1, n + 1, dtype=np.float64)
    if isinstance(spec, BetaShapley):
        return (betaln(spec.beta + s - 1.0, spec.alpha + n - s)
                - betaln(spec.beta, spec.alpha))
    if isinstance(spec, WeightedBanzhaf):
        return (s - 1.0) * np.log(spec.a) + (n - s) * np.log1p(-spec.a)
    p = np.asarray(spec.p, dtype=np.float64)
    if len(p) != n:
        raise SpecError(f"Custom weights have length {len(p)}, expected n={n}")
    with np.errstate(divide="ignore"):
        return np.log(p)


def make_weights(spec: SemivalueSpec, n: int) -> WeightVector:
    """Build the per-size weight vector of ``spec`` for ``n`` players.

    All binomial/Beta products are evaluated through log-gamma and
    exponentiated once per entry, so there is no overflow at any practical n;
    entries may underflow to zero only where they are genuinely below the
    smallest positive double.
    """
    if n < 1:
        raise SpecError(f"player count must be >= 1, got {n}")
    log_p = _log_p(spec, n)
    s = np.arange(1, n + 1, dtype=np.float64)
    log_m = _log_binom(n - 1.0, s - 1.0) + log_p
    p = np.exp(log_p)
    m = np.exp(log_m)
    if isinstance(spec, Custom):
        total = m.sum()
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise SpecError(
                f"Custom weights are not normalized: sum C(n-1,s-1) p_s = "
                f"{total!r} (must be 1 within {NORMALIZATION_TOL})")
    return WeightVector(n=n, p=p, m=m, log_p=log_p, log_m=log_m)


def normalize_custom(p) -> Custom:
    """Rescale a nonnegative vector so it is a valid Custom spec at n=len(p)."""
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or len(p) == 0:
        raise SpecError("expected a one-dimensional, nonempty weight vector")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise SpecError("Custom weights must be finite and nonnegative")
    n = len(p)
    log_p = np.where(p > 0, np.log(np.where(p > 0, p, 1.0)), -np.inf)
    total = np.exp(_log_binom(n - 1.0, np.arange(n, dtype=np.float64)) + log_p).sum()
    if total <= 0:
        raise SpecError("cannot normalize an all-zero weight vector")
    return Custom(tuple(p / total))


def moment(spec: SemivalueSpec, k: int) -> float:
    """k-th raw moment of the spec's measure: integral of w^k dmu(w)."""
    if k < 0:
        raise SpecError(f"moment order must be >= 0, got {k}")
    if isinstance(spec, BetaShapley):
        return float(np.exp(betaln(spec.beta + k, spec.alpha)
                            - betaln(spec.beta, spec.alpha)))
    if isinstance(spec, WeightedBanzhaf):
        return float(spec.a ** k)
    raise SpecError("Custom weight vectors have no measure representation")


def parse_semivalue(text: str) -> SemivalueSpec:
    """Parse a CLI spec string: ``beta:ALPHA:BETA``, ``wb:A`` or ``custom:@FILE``.

    The custom file holds one p_s per line (s = 1..n).
    """
    parts = text.split(":")
    kind = parts[0].lower()
    try:
        if kind == "beta" and len(parts) == 3:
            return BetaShapley(float(parts[1]), float(parts[2]))
        if kind == "wb" and len(parts) == 2:
            return WeightedBanzhaf(float(parts[1]))
        if kind == "custom" and len(parts) == 2 and parts[1].startswith("@"):
            path = Path(parts[1][1:])
            values = [float(line) for line in path.read_text().split()]
            return Custom(tuple(values))
    except (OSError, ValueError, SpecError) as exc:
        raise SpecError(f"bad semivalue spec {text!r}: {exc}") from exc
    raise SpecError(f"bad semivalue spec {text!r}: expected beta:ALPHA:BETA, "
                    "wb:A or custom:@FILE")


def semivalue_label(spec: SemivalueSpec) -> str:
    """Stable string form used in CLI metadata and report tables."""
    if isinstance(spec, BetaShapley):
        return f"beta:{spec.alpha:g}:{spec.beta:g}"
    if isinstance(spec, WeightedBanzhaf):
        return f"wb:{spec.a:g}"
    return f"custom:n={len(spec.p)}"
