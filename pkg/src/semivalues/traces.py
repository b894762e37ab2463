"""Checkpointed estimate traces and their CSV/JSONL serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

__all__ = ["EstimateTrace", "checkpoint_marks", "write_trace", "trace_lines"]


@dataclass
class EstimateTrace:
    """Estimates of all players at increasing utility-evaluation budgets.

    `checkpoints` pairs a cumulative evaluation count with the estimate the
    run held once that many evaluations were available; counts are strictly
    increasing and never exceed the declared budget.  `meta` carries
    everything needed to reproduce the run (estimator, semivalue, seed, mode,
    flags) plus diagnostics such as the evaluations actually consumed.
    """

    estimator: str
    semivalue: str
    seed: int
    n: int
    checkpoints: list[tuple[int, np.ndarray]]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        evals = [e for e, _ in self.checkpoints]
        if any(b <= a for a, b in zip(evals, evals[1:])):
            raise ValueError("checkpoint evaluation counts must be strictly "
                             "increasing")

    @property
    def final_estimate(self) -> np.ndarray:
        return self.checkpoints[-1][1]

    @property
    def final_evals(self) -> int:
        return self.checkpoints[-1][0]


def checkpoint_marks(total: int, count: int, floor: int = 1) -> list[int]:
    """`count` evenly spaced cumulative-evaluation marks over [1, total].

    Marks below `floor` (budget an estimator must consume before any estimate
    exists, e.g. an exact phase) are snapped up to it; duplicates collapse.
    The last mark is always `total`.
    """
    if count < 1:
        raise ValueError("need at least one checkpoint")
    if total < max(1, floor):
        raise ValueError(f"budget {total} cannot cover the minimum "
                         f"consumption {floor}")
    marks = sorted({max(floor, (total * k) // count) for k in range(1, count + 1)})
    if marks[-1] != total:
        marks.append(total)
    return marks


def _meta_items(trace: EstimateTrace):
    yield "estimator", trace.estimator
    yield "semivalue", trace.semivalue
    yield "seed", trace.seed
    yield "n", trace.n
    for key in sorted(trace.meta):
        yield key, trace.meta[key]


def trace_lines(trace: EstimateTrace, fmt: str = "csv"):
    """Render a trace as csv (with `# key=value` metadata header) or jsonl."""
    if fmt == "csv":
        for key, value in _meta_items(trace):
            yield f"# {key}={value}"
        yield "evals_total,player,estimate"
        for evals, estimate in trace.checkpoints:
            for i, value in enumerate(estimate):
                yield f"{evals},{i + 1},{value!r}"
    elif fmt == "jsonl":
        yield json.dumps({"meta": dict(_meta_items(trace))}, sort_keys=True)
        for evals, estimate in trace.checkpoints:
            yield json.dumps({"evals_total": int(evals),
                              "estimate": [float(v) for v in estimate]})
    else:
        raise ValueError(f"unknown trace format {fmt!r}")


def write_trace(trace: EstimateTrace, path, fmt: str = "csv") -> None:
    with open(path, "w") as fh:
        for line in trace_lines(trace, fmt):
            fh.write(line + "\n")
