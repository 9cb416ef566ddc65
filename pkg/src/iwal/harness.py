"""Experiment orchestration: streams, paired runs, curves, and summaries.

Every experiment runs the configured strategy over a training stream and a
passive twin (the same learner with every label queried) over the identical
stream order, evaluating both on a held-out test set at fixed checkpoints.
Training labels reach the learner only through a counting oracle, so the
reported query totals are exactly the number of label requests.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import bootstrap as bs
from .datasets import load_dataset
from .engine import ArrayOracle, Engine, QueryTrace
from .errors import ConfigError
from .hypotheses import (FiniteClass, LinearBall, LinearPredictor,
                         ThresholdPredictor, predict_many)
from .instances import (SphereInstance, lower_bound_instance,
                        point_mass_instance)
from .losses import LOSS_KINDS, LossFunction
from .thresholds import (ConstantThreshold, LossWeightingFinite,
                         LossWeightingLinear)
from .trees import TreeParams

STRATEGIES = ("passive", "loss-weighting-finite", "loss-weighting-linear",
              "bootstrap")
SLACK_MODES = ("paper", "optimistic")


@dataclass
class ExperimentConfig:
    dataset: dict
    strategy: str
    train_size: int
    test_size: int
    seed: int
    loss_kind: str = "logistic"
    range_bound: float = 1.0
    class_spec: dict = field(default_factory=lambda: {"kind": "linear",
                                                      "norm_bound": 1.0})
    confidence: float = 0.1
    slack_mode: str = "paper"
    slack_constant: float = 8.0
    p_min: float = 0.0
    replicates: int = 1
    checkpoint_every: int | None = None
    erm_every: int | None = None
    standardize: bool = False
    committee: dict = field(default_factory=dict)

    _KEYS = ("dataset", "strategy", "train_size", "test_size", "seed",
             "loss_kind", "range_bound", "class_spec", "confidence",
             "slack_mode", "slack_constant", "p_min", "replicates",
             "checkpoint_every", "erm_every", "standardize", "committee")

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r}")
        if self.loss_kind not in LOSS_KINDS:
            raise ConfigError(f"unknown loss kind {self.loss_kind!r}")
        if self.slack_mode not in SLACK_MODES:
            raise ConfigError(f"unknown slack mode {self.slack_mode!r}")
        if not isinstance(self.dataset, dict) or "kind" not in self.dataset:
            raise ConfigError("dataset must be a dict with a 'kind' entry")
        if self.train_size < 1 or self.test_size < 1:
            raise ConfigError("train and test sizes must be positive")
        if not 0.0 < self.confidence < 1.0:
            raise ConfigError("confidence must lie in (0, 1)")
        if not 0.0 <= self.p_min <= 1.0:
            raise ConfigError("p_min must lie in [0, 1]")
        if self.seed is None:
            raise ConfigError("a seed is required; unseeded runs are not allowed")
        if self.replicates < 1:
            raise ConfigError("replicates must be at least 1")
        if not self.range_bound > 0:
            raise ConfigError("range_bound must be positive")
        committee = {"size": 10, "p_min": 0.1, "initial_fraction": 0.1,
                     "max_depth": 8, "min_leaf": 2}
        unknown = set(self.committee) - set(committee)
        if unknown:
            raise ConfigError(f"unknown committee options {sorted(unknown)}")
        committee.update(self.committee)
        self.committee = committee
        if not 0.0 < self.committee["initial_fraction"] < 1.0:
            raise ConfigError("committee initial_fraction must lie in (0, 1)")

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        unknown = set(payload) - set(cls._KEYS)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        missing = {"dataset", "strategy", "train_size", "test_size", "seed"} - set(payload)
        if missing:
            raise ConfigError(f"missing config keys {sorted(missing)}")
        try:
            return cls(**payload)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        try:
            with open(path) as fh:
                payload = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_dict(payload)

    def to_dict(self) -> dict:
        return {key: getattr(self, key) for key in self._KEYS}

    def checkpoint_interval(self) -> int:
        if self.checkpoint_every is not None:
            if self.checkpoint_every < 1:
                raise ConfigError("checkpoint_every must be positive")
            return self.checkpoint_every
        return max(1, self.train_size // 100)


@dataclass
class ArmResult:
    checkpoints: list          # (t, cum_queries, test_loss, test_error)
    final_loss: float
    final_error: float | None
    queries: int
    trace: QueryTrace | None
    diagnostics: dict = field(default_factory=dict)


@dataclass
class RunReport:
    config: dict
    seed: int
    steps: int
    active: ArmResult
    passive: ArmResult

    def query_fraction(self) -> float:
        return self.active.queries / self.steps

    def curve_rows(self):
        passive_by_t = {t: loss for t, _, loss, _ in self.passive.checkpoints}
        rows = []
        for t, cum, loss, _ in self.active.checkpoints:
            rows.append((t, cum, loss, passive_by_t.get(t, math.nan)))
        return rows

    def summary_dict(self) -> dict:
        return {
            "seed": self.seed,
            "steps": self.steps,
            "strategy": self.config["strategy"],
            "active": {
                "final_test_loss": self.active.final_loss,
                "final_test_error": self.active.final_error,
                "queries": self.active.queries,
                "query_fraction": self.query_fraction(),
                "diagnostics": self.active.diagnostics,
            },
            "passive": {
                "final_test_loss": self.passive.final_loss,
                "final_test_error": self.passive.final_error,
                "queries": self.passive.queries,
            },
            "config": self.config,
        }


def evaluate_loss(predictor, X, y, loss: LossFunction) -> float:
    """Mean normalized test loss, grouped by label value for vector evals."""
    z = predict_many(predictor, X)
    y = np.asarray(y, dtype=float)
    total = 0.0
    for value in np.unique(y):
        mask = y == value
        total += float(np.sum(loss.eval_many(z[mask], float(value))))
    return total / len(y)


def evaluate_error(predictor, X, y) -> float | None:
    """Sign-agreement error; None when labels are not all -1/+1."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        return None
    z = predict_many(predictor, X)
    signs = np.where(z >= 0, 1.0, -1.0)
    return float(np.mean(signs != y))


def build_data(config: ExperimentConfig, rng: np.random.Generator):
    """(X_train, y_train, X_test, y_test, label_support) for the config."""
    spec = dict(config.dataset)
    kind = spec.pop("kind")
    n = config.train_size + config.test_size
    if kind == "file":
        path = spec.pop("path", None)
        fmt = spec.pop("format", "csv")
        if spec:
            raise ConfigError(f"unknown dataset options {sorted(spec)}")
        if path is None:
            raise ConfigError("file datasets need a 'path'")
        X, y = load_dataset(path, fmt)
        if len(X) < n:
            raise ConfigError(
                f"dataset has {len(X)} rows, need {n} for the requested split"
            )
        order = rng.permutation(len(X))[:n]
        X, y = X[order], y[order]
        support = (-1.0, 1.0)
    elif kind == "sphere":
        instance = SphereInstance(dim=int(spec.pop("dim", 5)),
                                  noise=float(spec.pop("noise", 0.0)))
        if spec:
            raise ConfigError(f"unknown dataset options {sorted(spec)}")
        X, y = instance.sample(rng, n)
        support = (-1.0, 1.0)
    elif kind == "point-mass":
        instance = point_mass_instance(
            beta=float(spec.pop("beta", 0.1)),
            dim=int(spec.pop("dim", 2)),
            binary_labels=bool(spec.pop("binary_labels", True)),
        )
        if spec:
            raise ConfigError(f"unknown dataset options {sorted(spec)}")
        X, y = instance.sample(rng, n)
        support = instance.label_support()
    elif kind == "lower-bound":
        hard = lower_bound_instance(
            num_atoms=int(spec.pop("atoms", 8)),
            eta=float(spec.pop("eta", 0.2)),
            eps=float(spec.pop("eps", 0.05)),
            rng=rng,
        )
        if spec:
            raise ConfigError(f"unknown dataset options {sorted(spec)}")
        X, y = hard.instance.sample(rng, n)
        support = (-1.0, 1.0)
    else:
        raise ConfigError(f"unknown dataset kind {kind!r}")
    split = config.train_size
    return X[:split], y[:split], X[split:], y[split:], support


def _standardize(X_train, X_test):
    mean = X_train.mean(axis=0)
    std = X_train.std(axis=0)
    std[std == 0.0] = 1.0
    return (X_train - mean) / std, (X_test - mean) / std


def _finite_members(size: int, dim: int, norm_bound: float, range_bound: float,
                    loss_kind: str, rng: np.random.Generator):
    members = []
    for _ in range(size):
        u = rng.normal(size=dim)
        u *= math.sqrt(norm_bound) / np.linalg.norm(u)
        if loss_kind == "zero-one":
            members.append(ThresholdPredictor(u))
        else:
            members.append(LinearPredictor(u, range_bound))
    return FiniteClass(tuple(members))


def _make_threshold(config: ExperimentConfig, loss, dim, labels, rng):
    """(threshold, hypothesis_class) for the engine-based strategies."""
    spec = dict(config.class_spec)
    kind = spec.pop("kind", "linear")
    norm_bound = float(spec.pop("norm_bound", 1.0))
    size = int(spec.pop("size", 16))
    if spec:
        raise ConfigError(f"unknown class options {sorted(spec)}")
    if config.strategy == "loss-weighting-finite" or kind == "finite":
        cls = _finite_members(size, dim, norm_bound, config.range_bound,
                              config.loss_kind, rng)
    else:
        cls = LinearBall(dim, norm_bound)
    if config.strategy == "passive":
        return ConstantThreshold(1.0), cls
    if config.strategy == "loss-weighting-finite":
        return LossWeightingFinite(cls, loss, config.confidence,
                                   config.slack_mode, config.slack_constant,
                                   labels), cls
    if config.strategy == "loss-weighting-linear":
        if not isinstance(cls, LinearBall):
            raise ConfigError("loss-weighting-linear needs a linear class spec")
        return LossWeightingLinear(dim, norm_bound, loss, config.confidence,
                                   config.slack_mode, labels), cls
    raise ConfigError(f"strategy {config.strategy} is not engine-based")


def _engine_arm(config, loss, X_train, y_train, X_test, y_test, labels,
                threshold, cls, rng, keep_trace=True) -> ArmResult:
    interval = config.checkpoint_interval()
    erm_every = config.erm_every if config.erm_every is not None else interval
    engine = Engine(loss, threshold, rng, hypothesis_class=cls,
                    p_min=config.p_min, erm_every=erm_every)
    oracle = ArrayOracle(y_train)
    checkpoints = []
    T = len(X_train)
    for i in range(T):
        engine.step(X_train[i], oracle)
        t = i + 1
        if t % interval == 0 or t == T:
            h = engine.refresh_hypothesis()
            checkpoints.append((t, engine.trace.query_count(),
                                evaluate_loss(h, X_test, y_test, loss),
                                evaluate_error(h, X_test, y_test)))
    h = engine.refresh_hypothesis()
    diagnostics = {"oracle_calls": oracle.calls}
    extra = getattr(threshold, "diagnostics", None)
    if callable(extra):
        diagnostics.update(extra())
    return ArmResult(
        checkpoints=checkpoints,
        final_loss=evaluate_loss(h, X_test, y_test, loss),
        final_error=evaluate_error(h, X_test, y_test),
        queries=oracle.calls,
        trace=engine.trace if keep_trace else None,
        diagnostics=diagnostics,
    )


def _bootstrap_arm(config, loss, X_train, y_train, X_test, y_test, labels,
                   seeds, passive: bool) -> ArmResult:
    """Committee pipeline; with passive=True every post-prefix label is taken."""
    committee_rng = np.random.default_rng(seeds[0])
    engine_rng = np.random.default_rng(seeds[1])
    costing_seed = seeds[2]
    opts = config.committee
    T = len(X_train)
    prefix = max(2, math.ceil(opts["initial_fraction"] * T))
    prefix = min(prefix, T)
    params = TreeParams(max_depth=opts["max_depth"], min_leaf=opts["min_leaf"])
    X0, y0 = X_train[:prefix], y_train[:prefix]
    if passive:
        threshold = ConstantThreshold(1.0)
    else:
        committee = bs.train_committee(X0, y0, committee_rng, size=opts["size"],
                                       p_min=opts["p_min"], params=params,
                                       initial_fraction=opts["initial_fraction"])
        threshold = bs.CommitteeThreshold(committee, loss, labels)
    engine = Engine(loss, threshold, engine_rng, hypothesis_class=None)
    oracle = ArrayOracle(y_train[prefix:])
    interval = config.checkpoint_interval()
    prefix_examples = bs.weighted_examples_from_arrays(X0, y0, np.ones(prefix))

    def snapshot(checkpoint_index):
        rng = np.random.default_rng([costing_seed, checkpoint_index])
        collected = prefix_examples + engine.sample
        resampled = bs.costing_resample(collected, rng)
        return bs.train_final(resampled, params, fallback=(X0, y0))

    checkpoints = []
    checkpoint_steps = sorted(set(
        [t for t in range(interval, T + 1, interval) if t >= prefix] + [T]
    ))
    next_idx = 0
    final_tree = None
    for t in range(prefix, T + 1):
        if t > prefix:
            engine.step(X_train[t - 1], oracle)
        while next_idx < len(checkpoint_steps) and checkpoint_steps[next_idx] == t:
            final_tree = snapshot(next_idx)
            checkpoints.append((t, prefix + engine.trace.query_count(),
                                evaluate_loss(final_tree, X_test, y_test, loss),
                                evaluate_error(final_tree, X_test, y_test)))
            next_idx += 1
    return ArmResult(
        checkpoints=checkpoints,
        final_loss=checkpoints[-1][2],
        final_error=checkpoints[-1][3],
        queries=prefix + oracle.calls,
        trace=engine.trace,
        diagnostics={"prefix": prefix, "oracle_calls": oracle.calls,
                     "final_tree_depth": final_tree.depth()},
    )


def run_experiment(config: ExperimentConfig) -> RunReport:
    """One seeded paired run: the configured strategy plus its passive twin."""
    ss = np.random.SeedSequence(config.seed)
    (data_seed, active_seed, passive_seed,
     aux_a, aux_b, aux_c, aux_d) = (int(s) for s in ss.generate_state(7))
    data_rng = np.random.default_rng(data_seed)
    X_train, y_train, X_test, y_test, support = build_data(config, data_rng)
    if config.standardize:
        X_train, X_test = _standardize(X_train, X_test)
    loss = LossFunction(config.loss_kind, config.range_bound)
    dim = X_train.shape[1]

    if config.strategy == "bootstrap":
        active = _bootstrap_arm(config, loss, X_train, y_train, X_test, y_test,
                                support, (aux_a, active_seed, aux_b), passive=False)
        passive = _bootstrap_arm(config, loss, X_train, y_train, X_test, y_test,
                                 support, (aux_c, passive_seed, aux_d), passive=True)
    else:
        class_rng = np.random.default_rng(aux_a)
        threshold, cls = _make_threshold(config, loss, dim, support, class_rng)
        active = _engine_arm(config, loss, X_train, y_train, X_test, y_test,
                             support, threshold, cls,
                             np.random.default_rng(active_seed))
        if config.strategy == "passive":
            passive = active
        else:
            passive = _engine_arm(config, loss, X_train, y_train, X_test, y_test,
                                  support, ConstantThreshold(1.0), cls,
                                  np.random.default_rng(passive_seed),
                                  keep_trace=False)
    return RunReport(config=config.to_dict(), seed=config.seed,
                     steps=config.train_size, active=active, passive=passive)


def run_replicates(config: ExperimentConfig):
    """Run `replicates` seeded repetitions; returns (reports, aggregate)."""
    reports = []
    for i in range(config.replicates):
        payload = config.to_dict()
        payload["seed"] = config.seed + i
        payload["replicates"] = 1
        reports.append(run_experiment(ExperimentConfig.from_dict(payload)))
    aggregate = aggregate_reports(reports)
    return reports, aggregate


def _mean_std(values):
    values = [v for v in values if v is not None]
    if not values:
        return None, None
    return float(np.mean(values)), float(np.std(values))


def aggregate_reports(reports) -> dict:
    active_loss = _mean_std([r.active.final_loss for r in reports])
    passive_loss = _mean_std([r.passive.final_loss for r in reports])
    active_err = _mean_std([r.active.final_error for r in reports])
    passive_err = _mean_std([r.passive.final_error for r in reports])
    fraction = _mean_std([r.query_fraction() for r in reports])
    return {
        "replicates": len(reports),
        "seeds": [r.seed for r in reports],
        "active_final_loss_mean": active_loss[0],
        "active_final_loss_std": active_loss[1],
        "passive_final_loss_mean": passive_loss[0],
        "passive_final_loss_std": passive_loss[1],
        "active_final_error_mean": active_err[0],
        "active_final_error_std": active_err[1],
        "passive_final_error_mean": passive_err[0],
        "passive_final_error_std": passive_err[1],
        "query_fraction_mean": fraction[0],
        "query_fraction_std": fraction[1],
    }


def emit_curves(report: RunReport, out_dir, stem: str = "") -> dict:
    """Write curve CSV, summary JSON, and the query trace; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    suffix = f"_{stem}" if stem else ""
    curve_path = os.path.join(out_dir, f"curve{suffix}.csv")
    summary_path = os.path.join(out_dir, f"summary{suffix}.json")
    trace_path = os.path.join(out_dir, f"trace{suffix}.csv")
    with open(curve_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "cum_queries", "active_test_loss",
                         "passive_test_loss"])
        for t, cum, active_loss, passive_loss in report.curve_rows():
            writer.writerow([t, cum, repr(active_loss), repr(passive_loss)])
    with open(summary_path, "w") as fh:
        json.dump(report.summary_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths = {"curve": curve_path, "summary": summary_path}
    if report.active.trace is not None:
        report.active.trace.write_csv(trace_path)
        paths["trace"] = trace_path
    return paths
