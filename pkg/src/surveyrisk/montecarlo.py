"""Reproducible, parallel Monte Carlo estimation of estimator risk.

Sampling model.  One replication draws a present survey of size n from
the cell probabilities and, when needed, a prior survey of size n* from
the group marginals.  Present draws are conditioned on every group total
being nonzero (otherwise the within-group conditionals are undefined):
a draw with an empty group is discarded and redrawn whole, never
renormalized.  Prior draws are unconditioned; a zero prior group count is
fine because the corresponding estimate contributes zero loss under the
0 log 0 convention.

Reproducibility contract.  Replications are partitioned into fixed blocks
of ``BLOCK_SIZE``.  Block b uses its own counter-based Philox generator
keyed by the 128-bit pair (seed, b), and draws in a fixed order:

  1. first-stage group totals: one multinomial(n, marginals) per
     replication (numpy's generator, which chains conditioned binomials);
  2. rejection pass: rows with an empty group are redrawn, ascending row
     order, until all rows pass or a row exhausts its rejection budget;
  3. second-stage cells: per group, multinomial(group total, conditionals);
  4. prior counts: a (rows, I-1) uniform array, then a chained binomial
     inverse-CDF per group.

Step 4 spends exactly one uniform per (replication, group) regardless of
n*, so runs at different n* but the same seed see comonotone prior counts;
simulated risk curves over n* are then smooth enough for the sample-size
solver to bisect.  Because prior variates are drawn after all present
variates, the three estimator kinds see identical surveys for a given
seed (common random numbers), which makes paired comparisons sharp.

Per-replication losses land in a preallocated buffer at their replication
index, and the mean is a single pairwise reduction over that buffer, so
results are bitwise identical for any worker count.  Worker threads each
own their blocks end to end; the only shared write target is the buffer,
at disjoint indices.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.special import rel_entr
from scipy.stats import binom

from .errors import (
    DomainError,
    MissingNStar,
    RejectionBudgetExceeded,
)
from .estimators import EstimatorKind
from .model import SurveyCounts, TwoStageModel

__all__ = [
    "BLOCK_SIZE",
    "SimulationConfig",
    "RiskEstimate",
    "sample_surveys",
    "simulate_risk",
    "discard_probability",
]

#: replications per RNG block; part of the reproducibility contract,
#: results change if this changes
BLOCK_SIZE = 4096


@dataclass(frozen=True)
class SimulationConfig:
    replications: int
    seed: int = 0
    max_rejections_per_rep: int = 10**6

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise DomainError("replications must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must fit in an unsigned 64-bit integer")
        if self.max_rejections_per_rep < 1:
            raise DomainError("max_rejections_per_rep must be >= 1")


@dataclass(frozen=True)
class RiskEstimate:
    """Monte Carlo mean loss with its uncertainty and discard accounting.

    ``std_error`` is the unbiased sample standard deviation of the
    per-replication losses divided by sqrt(replications).  The discard
    rate is discarded / (discarded + accepted), an unbiased frequency of
    the rejection event for a single draw.
    """

    mean_loss: float
    std_error: float
    replications: int
    discard_rate: float
    kind: EstimatorKind
    n: int
    n_star: int | None


class _ModelArrays:
    """Read-only numpy views of a model, shared by all worker threads."""

    def __init__(self, model: TwoStageModel) -> None:
        self.marginals = np.array([float(np.sum(c)) for c in model.cells])
        self.conditionals = [c / m for c, m in zip(model.cells, self.marginals)]
        self.sizes = np.array(model.group_sizes, dtype=np.int64)
        self.truth = model.flat()
        self.n_groups = len(model.cells)


def _block_generator(seed: int, block_index: int) -> np.random.Generator:
    key = np.array([seed, block_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_present(
    gen: np.random.Generator,
    ma: _ModelArrays,
    n: int,
    rows: int,
    max_rejections: int,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Group totals and cells for ``rows`` replications, discard rule applied.

    Returns (totals, cells, discarded).
    """
    totals = gen.multinomial(n, ma.marginals, size=rows).astype(np.int64)
    rejections = np.zeros(rows, dtype=np.int64)
    discarded = 0
    while True:
        bad = np.flatnonzero((totals == 0).any(axis=1))
        if bad.size == 0:
            break
        rejections[bad] += 1
        worst = int(rejections.max())
        if worst > max_rejections:
            raise RejectionBudgetExceeded(
                f"a replication discarded more than {max_rejections} draws "
                f"at n={n}; some group is almost never observed at this size"
            )
        discarded += int(bad.size)
        totals[bad] = gen.multinomial(n, ma.marginals, size=bad.size)

    cells = np.empty((rows, int(ma.sizes.sum())), dtype=np.int64)
    start = 0
    for gi in range(ma.n_groups):
        stop = start + int(ma.sizes[gi])
        cells[:, start:stop] = gen.multinomial(
            totals[:, gi], ma.conditionals[gi]
        )
        start = stop
    return totals, cells, discarded


def _draw_prior(
    gen: np.random.Generator, ma: _ModelArrays, n_star: int, rows: int
) -> np.ndarray:
    """Multinomial(n*, marginals) per row via a chained binomial inverse CDF.

    One uniform per (row, group) keeps draws comonotone across n*.
    """
    I = ma.n_groups
    u = gen.random((rows, I - 1))
    out = np.empty((rows, I), dtype=np.int64)
    remaining = np.full(rows, n_star, dtype=np.int64)
    prob_left = 1.0
    for i in range(I - 1):
        q = min(max(float(ma.marginals[i]) / prob_left, 0.0), 1.0)
        draw = binom.ppf(u[:, i], remaining, q)
        # ppf(0) of a discrete distribution is -1 by convention; clip it
        draw = np.maximum(draw, 0.0).astype(np.int64)
        out[:, i] = draw
        remaining -= draw
        prob_left -= float(ma.marginals[i])
    out[:, I - 1] = remaining
    return out


def _block_losses(
    kind: EstimatorKind,
    ma: _ModelArrays,
    n: int,
    n_star: int | None,
    seed: int,
    block_index: int,
    rows: int,
    max_rejections: int,
) -> tuple[np.ndarray, int]:
    gen = _block_generator(seed, block_index)
    totals, cells, discarded = _draw_present(gen, ma, n, rows, max_rejections)
    totals_rep = np.repeat(totals, ma.sizes, axis=1)

    if kind is EstimatorKind.PRESENT:
        est = cells / float(n)
    else:
        assert n_star is not None
        xstar = _draw_prior(gen, ma, n_star, rows)
        xstar_rep = np.repeat(xstar, ma.sizes, axis=1)
        if kind is EstimatorKind.PRIOR:
            est = (xstar_rep * cells) / (n_star * totals_rep)
        else:  # POOLED
            est = ((totals_rep + xstar_rep) * cells) / ((n + n_star) * totals_rep)

    return np.sum(rel_entr(est, ma.truth), axis=1), discarded


def simulate_risk(
    kind: EstimatorKind,
    model: TwoStageModel,
    n: int,
    n_star: int | None = None,
    config: SimulationConfig = SimulationConfig(replications=10_000),
    workers: int = 1,
) -> RiskEstimate:
    """Estimate one estimator's risk by averaging simulated losses.

    For a fixed (seed, replications, model, kind, n, n*) the result is
    identical for every ``workers`` value.  ``n_star`` is ignored for the
    present estimator.
    """
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if kind is EstimatorKind.PRESENT:
        n_star = None
    else:
        if n_star is None:
            raise MissingNStar(f"estimator {kind.value!r} needs n_star")
        if n_star < 1:
            raise DomainError(f"n_star must be a positive integer, got {n_star}")
    if workers < 1:
        raise DomainError(f"workers must be >= 1, got {workers}")

    ma = _ModelArrays(model)
    reps = config.replications
    losses = np.empty(reps, dtype=np.float64)
    n_blocks = (reps + BLOCK_SIZE - 1) // BLOCK_SIZE
    discards = np.zeros(n_blocks, dtype=np.int64)

    def run_block(b: int) -> None:
        start = b * BLOCK_SIZE
        rows = min(BLOCK_SIZE, reps - start)
        block, discarded = _block_losses(
            kind, ma, n, n_star, config.seed, b, rows,
            config.max_rejections_per_rep,
        )
        losses[start:start + rows] = block
        discards[b] = discarded

    if workers == 1 or n_blocks == 1:
        for b in range(n_blocks):
            run_block(b)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for future in [pool.submit(run_block, b) for b in range(n_blocks)]:
                future.result()

    mean = float(np.sum(losses) / reps)
    se = float(np.std(losses, ddof=1) / math.sqrt(reps)) if reps > 1 else 0.0
    discarded_total = int(discards.sum())
    return RiskEstimate(
        mean_loss=mean,
        std_error=se,
        replications=reps,
        discard_rate=discarded_total / (discarded_total + reps),
        kind=kind,
        n=n,
        n_star=n_star,
    )


def sample_surveys(
    model: TwoStageModel,
    n: int,
    n_star: int,
    rng: np.random.Generator,
    max_rejections: int = 10**6,
) -> tuple[SurveyCounts, int]:
    """Draw one pair of surveys; returns (counts, number of discarded draws).

    The present draw is rejected and redrawn until every group total is
    nonzero; the prior draw (omitted when ``n_star`` is 0) is a single
    unconditioned multinomial over the group marginals.
    """
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    if n_star < 0:
        raise DomainError(f"n_star must be >= 0, got {n_star}")
    ma = _ModelArrays(model)
    _, cells, discarded = _draw_present(rng, ma, n, 1, max_rejections)
    present = []
    start = 0
    for size in model.group_sizes:
        present.append(tuple(int(x) for x in cells[0, start:start + size]))
        start += size
    prior = None
    if n_star > 0:
        prior = tuple(int(x) for x in rng.multinomial(n_star, ma.marginals))
    return SurveyCounts(present=tuple(present), prior=prior), discarded


def discard_probability(model: TwoStageModel, n: int) -> float:
    """Exact probability that a present draw of size n leaves some group
    empty, by inclusion-exclusion over groups.

    This is the expected discard rate of :func:`simulate_risk` and decays
    exponentially in n, with rate set by the largest (1 - m_i.).
    """
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    marginals = [float(np.sum(c)) for c in model.cells]
    I = len(marginals)
    if I > 20:
        raise DomainError(
            "inclusion-exclusion over more than 20 groups is not supported"
        )
    terms = []
    for k in range(1, I + 1):
        sign = 1.0 if k % 2 == 1 else -1.0
        for subset in combinations(marginals, k):
            left = 1.0 - math.fsum(subset)
            if left > 0.0:
                terms.append(sign * left**n)
    return min(max(math.fsum(terms), 0.0), 1.0)
