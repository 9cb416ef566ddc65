"""Greedy information-gain decision trees for binary labels.

Axis-aligned threshold splits chosen by entropy reduction, deterministic
tie-breaking on (feature index, threshold), leaves labeled by majority vote
with ties going to +1. Trees serialize to plain nested dicts / JSON.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError

_MIN_GAIN = 1e-12


@dataclass(frozen=True)
class TreeParams:
    max_depth: int = 8
    min_leaf: int = 2

    def __post_init__(self):
        if self.max_depth < 0:
            raise ValueError("max_depth must be nonnegative")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")


def _entropy(n_pos: int, n: int) -> float:
    if n == 0 or n_pos == 0 or n_pos == n:
        return 0.0
    q = n_pos / n
    return -(q * math.log2(q) + (1 - q) * math.log2(1 - q))


def _majority(y: np.ndarray) -> float:
    pos = int(np.sum(y > 0))
    return 1.0 if pos * 2 >= len(y) else -1.0


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int):
    """(gain, feature, threshold) of the best entropy split, or None."""
    n = len(y)
    pos_total = int(np.sum(y > 0))
    parent = _entropy(pos_total, n)
    best = None
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        pos_prefix = np.cumsum(y[order] > 0)
        # split after position i (1-based count i+1 on the left)
        for i in range(n - 1):
            if values[i] == values[i + 1]:
                continue
            n_left = i + 1
            n_right = n - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            pos_left = int(pos_prefix[i])
            child = (n_left * _entropy(pos_left, n_left)
                     + n_right * _entropy(pos_total - pos_left, n_right)) / n
            gain = parent - child
            if best is None or gain > best[0] + _MIN_GAIN:
                threshold = 0.5 * (values[i] + values[i + 1])
                best = (gain, feature, threshold)
    return best


def _grow(X: np.ndarray, y: np.ndarray, depth: int, params: TreeParams) -> dict:
    if (depth >= params.max_depth or len(y) < 2 * params.min_leaf
            or np.all(y > 0) or np.all(y <= 0)):
        return {"label": _majority(y)}
    # zero-gain splits are allowed on impure nodes: parity-style patterns
    # only pay off a level deeper, and max_depth bounds the growth
    split = _best_split(X, y, params.min_leaf)
    if split is None:
        return {"label": _majority(y)}
    _, feature, threshold = split
    mask = X[:, feature] <= threshold
    return {
        "feature": int(feature),
        "threshold": float(threshold),
        "left": _grow(X[mask], y[mask], depth + 1, params),
        "right": _grow(X[~mask], y[~mask], depth + 1, params),
    }


class DecisionTree:
    """A fitted tree; construct via DecisionTree.fit or from_dict."""

    def __init__(self, root: dict, n_features: int):
        self.root = root
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, params: TreeParams = TreeParams()) -> "DecisionTree":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if len(X) == 0:
            raise ValueError("cannot fit a tree on an empty sample")
        return cls(_grow(X, y, 0, params), X.shape[1])

    @classmethod
    def leaf(cls, label: float, n_features: int) -> "DecisionTree":
        return cls({"label": 1.0 if label > 0 else -1.0}, n_features)

    def predict(self, x) -> float:
        x = np.asarray(x, dtype=float)
        if x.shape[0] != self.n_features:
            raise DimensionMismatchError(
                f"expected dimension {self.n_features}, got {x.shape[0]}"
            )
        node = self.root
        while "label" not in node:
            node = node["left"] if x[node["feature"]] <= node["threshold"] else node["right"]
        return node["label"]

    def predict_many(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        out = np.empty(len(X))
        for i, x in enumerate(X):
            out[i] = self.predict(x)
        return out

    def depth(self) -> int:
        def walk(node):
            if "label" in node:
                return 0
            return 1 + max(walk(node["left"]), walk(node["right"]))
        return walk(self.root)

    def to_dict(self) -> dict:
        return {"n_features": self.n_features, "root": self.root}

    @classmethod
    def from_dict(cls, payload: dict) -> "DecisionTree":
        return cls(payload["root"], payload["n_features"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "DecisionTree":
        return cls.from_dict(json.loads(text))
