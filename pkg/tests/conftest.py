import numpy as np
import pytest

from iwal.hypotheses import LinearPredictor, WeightedExample


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_weighted_examples(rng, n, dim, max_weight=5.0, labels=(-1.0, 1.0)):
    examples = []
    for _ in range(n):
        x = rng.uniform(-1.0, 1.0, size=dim)
        y = labels[rng.integers(len(labels))]
        w = rng.uniform(1.0, max_weight)
        examples.append(WeightedExample(x, y, w))
    return examples


def random_linear_predictors(rng, n, dim, norm_bound=1.0, range_bound=1.0):
    predictors = []
    for _ in range(n):
        u = rng.normal(size=dim)
        u *= np.sqrt(norm_bound) * rng.uniform(0.2, 1.0) / np.linalg.norm(u)
        predictors.append(LinearPredictor(u, range_bound))
    return predictors


def pair_spread_oracle(x, predictors, loss, labels=(-1.0, 1.0)):
    """Literal double loop over ordered pairs and labels."""
    best = 0.0
    for f in predictors:
        for g in predictors:
            for y in labels:
                gap = loss.eval(f.predict(x), y) - loss.eval(g.predict(x), y)
                best = max(best, gap)
    return best
