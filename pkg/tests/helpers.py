"""Shared generators for randomized property tests.

Everything is driven by a caller-supplied Generator so test files stay
deterministic; no global random state.
"""

from __future__ import annotations

import numpy as np

from surveyrisk import ProbabilityEstimate, TwoStageModel, build_model


def random_model(rng: np.random.Generator, max_groups: int = 5,
                 max_cells: int = 6) -> TwoStageModel:
    """A model with random layout and Gamma-drawn positive cells."""
    n_groups = int(rng.integers(2, max_groups + 1))
    sizes = rng.integers(1, max_cells + 1, size=n_groups)
    cells = [rng.gamma(shape=1.0, scale=1.0, size=int(k)) + 1e-3
             for k in sizes]
    return build_model(cells, renormalize=True)


def random_estimate(rng: np.random.Generator,
                    model: TwoStageModel) -> ProbabilityEstimate:
    """A valid estimate on the model's layout; occasionally contains an
    exactly-zero cell or a whole zeroed group, the shapes the prior
    estimator can produce."""
    groups = [rng.gamma(shape=1.0, scale=1.0, size=len(c)) + 1e-6
              for c in model.cells]
    if rng.random() < 0.3:
        g = int(rng.integers(0, len(groups)))
        j = int(rng.integers(0, groups[g].size))
        groups[g][j] = 0.0
    if rng.random() < 0.15 and len(groups) > 2:
        groups[int(rng.integers(0, len(groups)))][:] = 0.0
    total = float(np.sum(np.concatenate(groups)))
    return ProbabilityEstimate(cells=tuple(g / total for g in groups))
