"""The streaming sampler: biased coins, weighted sample set, running ERM.

Each step asks the rejection threshold for a query probability on the
incoming point, flips a seeded coin, and on success requests the label and
stores the example with weight 1/p. The label oracle is consulted only for
queried points. The importance-weighted loss estimate built from the
resulting sample is unbiased for the true loss of any fixed hypothesis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import InvalidTraceError, ThresholdContractError
from .hypotheses import FiniteClass, LinearBall, WeightedExample, erm_weighted
from .losses import LossFunction
from .thresholds import validate_probability


class StepRecord(NamedTuple):
    t: int
    x: object
    y: object          # None when the label was not queried
    p: float
    queried: int


@dataclass
class QueryTrace:
    """Per-step record of the sampling decisions."""

    records: list = field(default_factory=list)

    def append(self, record: StepRecord) -> None:
        self.records.append(record)

    def __len__(self):
        return len(self.records)

    def query_count(self) -> int:
        return sum(r.queried for r in self.records)

    def cumulative_queries(self) -> np.ndarray:
        return np.cumsum([r.queried for r in self.records])

    def write_csv(self, path) -> None:
        cum = 0
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "p_t", "q_t", "cum_queries"])
            for r in self.records:
                cum += r.queried
                writer.writerow([r.t, repr(r.p), r.queried, cum])


def weighted_loss_estimate(records, predictor, loss: LossFunction,
                           steps: int | None = None) -> float:
    """Importance-weighted empirical loss (1/T) sum q/p * l(h(x), y).

    Steps with q = 0 contribute exactly zero and their labels are never
    touched. A record claiming a query at p = 0 is rejected.
    """
    records = list(records)
    T = len(records) if steps is None else steps
    if T < 1:
        raise ValueError("the estimate needs at least one step")
    total = 0.0
    for r in records:
        if not r.queried:
            continue
        if r.p == 0.0:
            raise InvalidTraceError(f"step {r.t} queried at probability zero")
        total += loss.eval(predictor.predict(r.x), r.y) / r.p
    return total / T


class Engine:
    """Runs the sampling loop for one stream with one threshold strategy.

    The hypothesis class may be None when only the query trace matters.
    Finite classes keep incremental per-member weighted loss sums so the
    running minimizer costs O(|H|) per queried point; the linear ball
    recomputes through the solver, throttled to every `erm_every` queries
    (the final hypothesis is always refreshed).
    """

    def __init__(self, loss: LossFunction, threshold, rng: np.random.Generator,
                 hypothesis_class=None, p_min: float = 0.0, erm_every: int = 1):
        if not 0.0 <= p_min <= 1.0:
            raise ValueError("p_min must lie in [0, 1]")
        self.loss = loss
        self.threshold = threshold
        self.rng = rng
        self.hypothesis_class = hypothesis_class
        self.p_min = p_min
        self.erm_every = max(int(erm_every), 0)
        self.t = 0
        self.sample: list[WeightedExample] = []
        self.trace = QueryTrace()
        self.oracle_calls = 0
        self._current = None
        self._stale = False
        self._queries_since_fit = 0
        if isinstance(hypothesis_class, FiniteClass):
            self._member_sums = np.zeros(len(hypothesis_class.members))
            self._current = hypothesis_class.members[0]
        elif isinstance(hypothesis_class, LinearBall):
            self._current = erm_weighted(hypothesis_class, [], loss)

    def step(self, x, oracle: Callable) -> StepRecord:
        """Process one unlabeled point.

        oracle(i, x) is called only on a query, with i the 0-based position
        of x in this engine's stream.
        """
        self.t += 1
        raw = self.threshold.probability(x)
        p = validate_probability(raw)
        p = max(p, self.p_min)
        queried = 1 if self.rng.random() < p else 0
        y = None
        if queried:
            y = float(oracle(self.t - 1, x))
            self.oracle_calls += 1
            self.sample.append(WeightedExample(x, y, 1.0 / p))
            self._update_hypothesis(x, y, 1.0 / p)
        self.threshold.record(x, y, p, queried)
        record = StepRecord(self.t, x, y, p, queried)
        self.trace.append(record)
        return record

    def _update_hypothesis(self, x, y, weight) -> None:
        cls = self.hypothesis_class
        if cls is None:
            return
        if isinstance(cls, FiniteClass):
            for i, h in enumerate(cls.members):
                self._member_sums[i] += weight * self.loss.eval(h.predict(x), y)
            self._current = cls.members[int(np.argmin(self._member_sums))]
            return
        self._queries_since_fit += 1
        self._stale = True
        if self.erm_every and self._queries_since_fit >= self.erm_every:
            self.refresh_hypothesis()

    def refresh_hypothesis(self):
        """Force the running minimizer up to date; returns it."""
        if self._stale:
            start = getattr(self._current, "weights", None)
            self._current = erm_weighted(
                self.hypothesis_class, self.sample, self.loss, start=start
            )
            self._stale = False
            self._queries_since_fit = 0
        return self._current

    @property
    def hypothesis(self):
        return self._current

    def run_stream(self, xs, oracle: Callable):
        """Consume the whole stream; returns (final hypothesis, trace)."""
        for x in xs:
            self.step(x, oracle)
        return self.refresh_hypothesis(), self.trace


class ArrayOracle:
    """Label source over a fixed stream, counting every consultation."""

    def __init__(self, labels):
        self.labels = np.asarray(labels, dtype=float)
        self.calls = 0

    def __call__(self, i, x) -> float:
        self.calls += 1
        return float(self.labels[i])
