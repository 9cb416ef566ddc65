import numpy as np
import pytest

from iwal.errors import DimensionMismatchError
from iwal.hypotheses import (ConstantPredictor, FiniteClass, LinearBall,
                             LinearPredictor, TablePredictor,
                             ThresholdPredictor, WeightedExample, erm_weighted,
                             weighted_total_loss)
from iwal.losses import LossFunction

from conftest import random_weighted_examples


class TestPredict:
    def test_dot_product(self):
        h = LinearPredictor(np.array([1.0, 0.0]), range_bound=1.0)
        assert h.predict(np.array([0.5, 7.0])) == 0.5

    def test_clamped_at_range_bound(self):
        h = LinearPredictor(np.array([2.0, 0.0]), range_bound=1.0)
        assert h.predict(np.array([1.0, 0.0])) == 1.0

    def test_zero_predictor(self, rng):
        h = LinearPredictor(np.zeros(3), range_bound=1.0)
        assert h.predict(rng.normal(size=3)) == 0.0

    def test_dimension_mismatch(self):
        h = LinearPredictor(np.array([1.0, 2.0]), range_bound=1.0)
        with pytest.raises(DimensionMismatchError):
            h.predict(np.array([1.0, 2.0, 3.0]))

    def test_threshold_predictor_signs(self):
        h = ThresholdPredictor(np.array([1.0, -1.0]))
        assert h.predict(np.array([1.0, 0.0])) == 1.0
        assert h.predict(np.array([0.0, 1.0])) == -1.0
        assert h.predict(np.array([0.0, 0.0])) == 1.0  # sign(0) convention

    def test_table_predictor(self):
        h = TablePredictor({(0.0, 1.0): 0.5})
        assert h.predict(np.array([0.0, 1.0])) == 0.5
        with pytest.raises(DimensionMismatchError):
            h.predict(np.array([9.0, 9.0]))

    def test_predict_many_matches_scalar(self, rng):
        h = LinearPredictor(rng.normal(size=4), range_bound=1.0)
        X = rng.normal(size=(10, 4))
        batch = h.predict_many(X)
        for x, z in zip(X, batch):
            assert z == pytest.approx(h.predict(x))


class TestWeightedExample:
    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            WeightedExample(np.zeros(2), 1.0, 0.0)

    def test_rejects_label_outside_unit_interval(self):
        with pytest.raises(ValueError):
            WeightedExample(np.zeros(2), 2.0, 1.0)

    def test_accepts_zero_label(self):
        WeightedExample(np.zeros(2), 0.0, 3.0)


class TestFiniteErm:
    def test_only_consistent_member_wins(self):
        cls = FiniteClass((ConstantPredictor(1.0), ConstantPredictor(-1.0)))
        loss = LossFunction("zero-one")
        sample = [WeightedExample(np.array([0.3]), 1.0, 2.0)]
        assert erm_weighted(cls, sample, loss) is cls.members[0]

    def test_empty_sample_returns_first_member(self):
        cls = FiniteClass((ConstantPredictor(-1.0), ConstantPredictor(1.0)))
        assert erm_weighted(cls, [], LossFunction("zero-one")) is cls.members[0]

    def test_matches_brute_force_on_random_instances(self, rng):
        loss = LossFunction("zero-one")
        for _ in range(20):
            size = int(rng.integers(2, 9))
            points = rng.normal(size=(16, 2))
            members = tuple(
                ThresholdPredictor(rng.normal(size=2)) for _ in range(size)
            )
            cls = FiniteClass(members)
            sample = [
                WeightedExample(points[rng.integers(16)],
                                rng.choice([-1.0, 1.0]),
                                rng.uniform(1.0, 4.0))
                for _ in range(10)
            ]
            winner = erm_weighted(cls, sample, loss)
            totals = [weighted_total_loss(h, sample, loss) for h in members]
            # first minimizer in member order
            expected = members[int(np.argmin(totals))]
            assert winner is expected

    def test_weight_scaling_leaves_argmin_unchanged(self, rng):
        loss = LossFunction("logistic", 1.0)
        members = tuple(LinearPredictor(rng.normal(size=3), 1.0) for _ in range(12))
        cls = FiniteClass(members)
        sample = random_weighted_examples(rng, 20, 3)
        scaled = [WeightedExample(e.x, e.y, 7.5 * e.weight) for e in sample]
        assert erm_weighted(cls, sample, loss) is erm_weighted(cls, scaled, loss)

    def test_larger_brute_force_sweep(self, rng):
        loss = LossFunction("logistic", 1.0)
        for _ in range(5):
            members = tuple(
                LinearPredictor(rng.normal(size=2), 1.0)
                for _ in range(int(rng.integers(8, 64)))
            )
            cls = FiniteClass(members)
            sample = random_weighted_examples(rng, int(rng.integers(1, 64)), 2)
            winner = erm_weighted(cls, sample, loss)
            best = min(weighted_total_loss(h, sample, loss) for h in members)
            assert weighted_total_loss(winner, sample, loss) == pytest.approx(best)


class TestLinearErm:
    def test_two_point_squared_loss(self):
        # with a generous norm bound this is unconstrained least squares
        loss = LossFunction("squared", 2.0)
        ball = LinearBall(dim=2, norm_bound=25.0)
        sample = [
            WeightedExample(np.array([1.0, 0.0]), 1.0, 1.0),
            WeightedExample(np.array([0.0, 1.0]), -1.0, 1.0),
        ]
        h = erm_weighted(ball, sample, loss)
        assert h.weights == pytest.approx(np.array([1.0, -1.0]), abs=1e-4)

    def test_empty_sample_returns_zero_vector(self):
        h = erm_weighted(LinearBall(3, 1.0), [], LossFunction("logistic", 1.0))
        assert np.all(h.weights == 0.0)

    def test_objective_matches_grid_search(self, rng):
        loss = LossFunction("logistic", 1.0)
        ball = LinearBall(dim=2, norm_bound=1.0)
        sample = random_weighted_examples(rng, 12, 2)
        h = erm_weighted(ball, sample, loss)

        def objective(u):
            total = 0.0
            for e in sample:
                total += e.weight * loss.margin_loss(e.y * float(u @ e.x))
            return total

        # two-stage polar grid refinement, independent of the solver
        best = np.inf
        center_r, center_a, half_r, half_a = 0.5, np.pi, 0.5, np.pi
        for _ in range(4):
            radii = np.linspace(max(0.0, center_r - half_r),
                                min(1.0, center_r + half_r), 41)
            angles = np.linspace(center_a - half_a, center_a + half_a, 81)
            for r in radii:
                for a in angles:
                    u = np.array([r * np.cos(a), r * np.sin(a)])
                    val = objective(u)
                    if val < best:
                        best, center_r, center_a = val, r, a
            half_r /= 8.0
            half_a /= 8.0
        assert objective(h.weights) <= best + 1e-6 * (1 + abs(best))
