import numpy as np
import pytest

from iwal.errors import DimensionMismatchError
from iwal.trees import DecisionTree, TreeParams


class TestFit:
    def test_pure_labels_give_single_leaf(self, rng):
        X = rng.normal(size=(30, 3))
        y = np.ones(30)
        tree = DecisionTree.fit(X, y)
        assert tree.root == {"label": 1.0}
        assert tree.depth() == 0

    def test_xor_pattern_needs_depth_two(self):
        X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
        y = np.array([-1.0, 1.0, 1.0, -1.0])
        tree = DecisionTree.fit(X, y, TreeParams(max_depth=2, min_leaf=1))
        assert np.array_equal(tree.predict_many(X), y)
        assert tree.depth() == 2

    def test_threshold_separable_data(self, rng):
        X = rng.uniform(-1.0, 1.0, size=(60, 4))
        y = np.where(X[:, 2] > 0.15, 1.0, -1.0)
        tree = DecisionTree.fit(X, y, TreeParams(max_depth=3, min_leaf=1))
        assert np.array_equal(tree.predict_many(X), y)

    def test_max_depth_respected(self, rng):
        X = rng.normal(size=(200, 3))
        y = rng.choice([-1.0, 1.0], size=200)
        for depth in (0, 1, 2, 4):
            tree = DecisionTree.fit(X, y, TreeParams(max_depth=depth, min_leaf=1))
            assert tree.depth() <= depth

    def test_min_leaf_respected(self, rng):
        X = rng.normal(size=(50, 2))
        y = rng.choice([-1.0, 1.0], size=50)
        tree = DecisionTree.fit(X, y, TreeParams(max_depth=8, min_leaf=5))

        def check(node, Xn):
            if "label" in node:
                assert len(Xn) >= 5
                return
            mask = Xn[:, node["feature"]] <= node["threshold"]
            check(node["left"], Xn[mask])
            check(node["right"], Xn[~mask])

        check(tree.root, X)

    def test_deterministic_given_data(self, rng):
        X = rng.normal(size=(80, 3))
        y = rng.choice([-1.0, 1.0], size=80)
        a = DecisionTree.fit(X, y)
        b = DecisionTree.fit(X, y)
        assert a.to_dict() == b.to_dict()

    def test_empty_sample_rejected(self):
        with pytest.raises(ValueError):
            DecisionTree.fit(np.zeros((0, 2)), np.zeros(0))


class TestPredict:
    def test_dimension_check(self, rng):
        tree = DecisionTree.fit(rng.normal(size=(10, 2)),
                                rng.choice([-1.0, 1.0], size=10))
        with pytest.raises(DimensionMismatchError):
            tree.predict(np.zeros(3))

    def test_leaf_tree_predicts_constant(self, rng):
        tree = DecisionTree.leaf(-1.0, 4)
        assert np.all(tree.predict_many(rng.normal(size=(9, 4))) == -1.0)

    def test_labels_are_signs(self, rng):
        X = rng.normal(size=(120, 3))
        y = rng.choice([-1.0, 1.0], size=120)
        tree = DecisionTree.fit(X, y)
        out = tree.predict_many(rng.normal(size=(40, 3)))
        assert set(np.unique(out)) <= {-1.0, 1.0}


class TestSerialization:
    def test_json_round_trip(self, rng):
        X = rng.normal(size=(60, 3))
        y = rng.choice([-1.0, 1.0], size=60)
        tree = DecisionTree.fit(X, y)
        clone = DecisionTree.from_json(tree.to_json())
        probe = rng.normal(size=(25, 3))
        assert np.array_equal(tree.predict_many(probe), clone.predict_many(probe))
        assert clone.to_json() == tree.to_json()
