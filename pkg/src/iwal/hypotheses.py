"""Predictors, hypothesis classes, and importance-weighted ERM.

Two class representations are supported: an explicit finite set of predictors
(scanned exhaustively) and the ball of linear predictors with a squared-norm
bound (handed to the interior-point solver). Linear predictions are clamped
into the loss's prediction range so that normalized losses stay in [0, 1]
even when the raw inner product exceeds the range.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .losses import LossFunction


@dataclass(frozen=True)
class LinearPredictor:
    """Clamped linear predictor: z = clip(u . x, -range_bound, +range_bound)."""

    weights: np.ndarray
    range_bound: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != self.weights.shape:
            raise DimensionMismatchError(
                f"expected dimension {self.weights.shape[0]}, got {x.shape}"
            )
        b = self.range_bound
        return float(min(max(float(self.weights @ x), -b), b))

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.clip(X @ self.weights, -self.range_bound, self.range_bound)


@dataclass(frozen=True)
class ThresholdPredictor:
    """Sign predictor for zero-one loss: z = sign(u . x), with sign(0) = +1."""

    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape != self.weights.shape:
            raise DimensionMismatchError(
                f"expected dimension {self.weights.shape[0]}, got {x.shape}"
            )
        return 1.0 if float(self.weights @ x) >= 0 else -1.0

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        return np.where(X @ self.weights >= 0, 1.0, -1.0)


@dataclass(frozen=True)
class ConstantPredictor:
    value: float

    def predict(self, x) -> float:
        return self.value

    def predict_many(self, X) -> np.ndarray:
        return np.full(len(X), self.value)


class TablePredictor:
    """Lookup predictor over a finite input support, keyed by tuple(x)."""

    def __init__(self, table: dict):
        self.table = {tuple(np.asarray(k, dtype=float).tolist()): float(v)
                      for k, v in table.items()}

    def predict(self, x) -> float:
        key = tuple(np.asarray(x, dtype=float).tolist())
        try:
            return self.table[key]
        except KeyError:
            raise DimensionMismatchError(f"input {key} not in predictor table") from None

    def predict_many(self, X) -> np.ndarray:
        return np.array([self.predict(x) for x in X])

    def __eq__(self, other):
        return isinstance(other, TablePredictor) and self.table == other.table

    def __hash__(self):
        return hash(frozenset(self.table.items()))


def predict_many(predictor, X) -> np.ndarray:
    """Batch predictions, using the predictor's vectorized path when present."""
    fn = getattr(predictor, "predict_many", None)
    if fn is not None:
        return np.asarray(fn(X), dtype=float)
    return np.array([predictor.predict(x) for x in X], dtype=float)


@dataclass(frozen=True)
class WeightedExample:
    """A queried example carrying its importance weight (1/p at query time)."""

    x: np.ndarray
    y: float
    weight: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if not self.weight > 0:
            raise ValueError(f"importance weight must be positive, got {self.weight}")
        if abs(self.y) > 1.0:
            raise ValueError(f"label {self.y} outside [-1, 1]")


@dataclass(frozen=True)
class FiniteClass:
    """An explicit, ordered hypothesis set; order breaks ERM ties."""

    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("a finite hypothesis class must be nonempty")

    def __len__(self):
        return len(self.members)


@dataclass(frozen=True)
class LinearBall:
    """Linear predictors u with squared norm at most norm_bound."""

    dim: int
    norm_bound: float = 1.0

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be at least 1")
        if not self.norm_bound > 0:
            raise ValueError("norm_bound must be positive")


def weighted_total_loss(predictor, examples, loss: LossFunction) -> float:
    """Sum of weight * normalized loss over the weighted sample."""
    return sum(e.weight * loss.eval(predictor.predict(e.x), e.y) for e in examples)


def erm_weighted(hypothesis_class, examples, loss: LossFunction,
                 solver_options=None, start=None):
    """Importance-weighted empirical risk minimizer over the class.

    Finite classes are scanned exhaustively; the first minimizer in member
    order wins ties. The linear ball delegates to the log-barrier solver
    (smooth losses only). An empty sample returns the canonical element:
    member 0, or the zero vector.
    """
    if isinstance(hypothesis_class, FiniteClass):
        members = hypothesis_class.members
        if not examples:
            return members[0]
        best, best_val = None, None
        for h in members:
            val = weighted_total_loss(h, examples, loss)
            if best_val is None or val < best_val:
                best, best_val = h, val
        return best
    if isinstance(hypothesis_class, LinearBall):
        from . import solver  # deferred: solver imports losses

        if not examples:
            return LinearPredictor(np.zeros(hypothesis_class.dim), loss.range_bound)
        xs = np.array([e.x for e in examples], dtype=float)
        ys = np.array([e.y for e in examples], dtype=float)
        ws = np.array([e.weight for e in examples], dtype=float)
        result = solver.minimize_weighted_loss(
            loss, xs, ys, ws, hypothesis_class.norm_bound,
            start=start, options=solver_options,
        )
        return LinearPredictor(result.point, loss.range_bound)
    raise TypeError(f"unsupported hypothesis class {type(hypothesis_class).__name__}")
