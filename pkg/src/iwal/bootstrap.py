"""Bootstrap-committee rejection threshold and costing resampling.

A committee of trees is trained once on bootstrap resamples of an initial
labeled prefix and never retrained. The query probability for a new point is
a floor plus the committee's loss disagreement on it, so it never drops below
p_min and the safety guarantees for floor-bounded sampling apply. After the
stream, rejection sampling with acceptance weight/max-weight turns the
importance-weighted sample back into an unweighted one for a final learner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hypotheses import WeightedExample
from .losses import LossFunction
from .thresholds import loss_spread_finite
from .trees import DecisionTree, TreeParams


@dataclass(frozen=True)
class Committee:
    members: tuple
    p_min: float = 0.1
    initial_fraction: float = 0.1

    def __post_init__(self):
        if len(self.members) < 2:
            raise ValueError("a committee needs at least 2 members")
        if not 0.0 < self.p_min <= 1.0:
            raise ValueError("p_min must lie in (0, 1]")

    def __len__(self):
        return len(self.members)


def train_committee(X, y, rng: np.random.Generator, size: int = 10,
                    p_min: float = 0.1, params: TreeParams = TreeParams(),
                    initial_fraction: float = 0.1) -> Committee:
    """Train `size` trees, each on a with-replacement resample of the prefix."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(X) == 0:
        raise ValueError("committee prefix must be nonempty")
    members = []
    for _ in range(size):
        idx = rng.integers(0, len(X), size=len(X))
        members.append(DecisionTree.fit(X[idx], y[idx], params))
    return Committee(tuple(members), p_min=p_min, initial_fraction=initial_fraction)


def query_probability(x, committee: Committee, loss: LossFunction,
                      labels=(-1.0, 1.0)) -> float:
    """p_min + (1 - p_min) * largest pairwise loss difference on x."""
    spread = loss_spread_finite(x, committee.members, loss, labels)
    return committee.p_min + (1.0 - committee.p_min) * spread


class CommitteeThreshold:
    """Rejection threshold driven by committee disagreement."""

    def __init__(self, committee: Committee, loss: LossFunction,
                 labels=(-1.0, 1.0)):
        self.committee = committee
        self.loss = loss
        self.labels = tuple(labels)

    def probability(self, x) -> float:
        return query_probability(x, self.committee, self.loss, self.labels)

    def record(self, x, y, p, queried) -> None:
        pass


def costing_resample(examples, rng: np.random.Generator) -> list:
    """Reject-sample a weighted set down to an unweighted one.

    Each example is kept independently with probability weight / max weight,
    so for any fixed f, E[sum over kept f(x)] * max weight recovers the
    weighted sum. Returns (x, y) pairs.
    """
    examples = list(examples)
    if not examples:
        return []
    max_weight = max(e.weight for e in examples)
    kept = []
    for e in examples:
        if rng.random() < e.weight / max_weight:
            kept.append((e.x, e.y))
    return kept


def train_final(resampled, params: TreeParams = TreeParams(),
                fallback=None) -> DecisionTree:
    """Train the final tree on the costing output.

    An empty resample falls back to a majority stump over the fallback
    examples (normally the committee's initial prefix).
    """
    if resampled:
        X = np.array([x for x, _ in resampled], dtype=float)
        y = np.array([label for _, label in resampled], dtype=float)
        return DecisionTree.fit(X, y, params)
    if fallback is None or len(fallback[1]) == 0:
        raise ValueError("empty resample and no fallback prefix")
    X, y = fallback
    majority = 1.0 if np.sum(np.asarray(y) > 0) * 2 >= len(y) else -1.0
    return DecisionTree.leaf(majority, np.asarray(X).shape[1])


def weighted_examples_from_arrays(X, y, weights) -> list:
    return [WeightedExample(x, float(label), float(w))
            for x, label, w in zip(X, y, weights)]
