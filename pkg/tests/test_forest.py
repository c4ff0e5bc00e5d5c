import numpy as np
import pytest

from eegattn.forest import (
    RandomForest,
    fit_forest,
    fit_tree,
    gini,
    load_forest,
    predict,
    save_forest,
    top_k_features,
)


def separable_data(n=200, d=5, informative=3, seed=0, margin=0.5):
    """Labels decided by the sign of one feature, with a margin."""
    rng = np.random.default_rng(seed)
    X = rng.normal(0, 1, (n, d))
    y = (X[:, informative] > 0).astype(int)
    X[:, informative] += np.where(y == 1, margin, -margin)
    return X, y


class TestGini:
    def test_maximal_binary_impurity(self):
        assert gini([5, 5]) == 0.5

    def test_pure_node(self):
        assert gini([10, 0]) == 0.0

    def test_closed_form(self):
        assert gini([3, 1]) == pytest.approx(0.375)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError, match="zero"):
            gini([0, 0])


class TestFitTree:
    def test_separable_pair_one_split(self):
        tree = fit_tree(np.array([[0.0], [1.0]]), np.array([0, 1]))
        assert tree.n_nodes == 3
        assert tree.feature[0] == 0
        assert tree.threshold[0] == pytest.approx(0.5)
        labels = np.argmax(tree.predict_proba(np.array([[0.0], [1.0]])), axis=1)
        assert labels.tolist() == [0, 1]

    def test_constant_features_single_majority_leaf(self):
        X = np.ones((7, 3))
        y = np.array([0, 0, 0, 0, 1, 1, 1])
        tree = fit_tree(X, y)
        assert tree.n_nodes == 1
        assert tree.class_counts[0].tolist() == [4, 3]
        proba = tree.predict_proba(np.ones((2, 3)))
        assert np.allclose(proba, [4 / 7, 3 / 7])

    def test_informative_feature_takes_the_impurity_decrease(self):
        X, y = separable_data(n=200, d=5, informative=3, seed=1)
        tree = fit_tree(X, y, max_features=5, rng=np.random.default_rng(1))
        share = tree.impurity_decrease[3] / tree.impurity_decrease.sum()
        assert share >= 0.99

    def test_fully_grown_tree_memorises_distinct_inputs(self):
        rng = np.random.default_rng(9)
        X = rng.normal(0, 1, (64, 4))
        y = rng.integers(0, 2, 64)
        tree = fit_tree(X, y, rng=np.random.default_rng(0))
        pred = np.argmax(tree.predict_proba(X), axis=1)
        assert np.array_equal(pred, y)

    def test_leaf_counts_partition_samples(self):
        X, y = separable_data(n=120, d=4, informative=0, seed=2)
        tree = fit_tree(X, y, rng=np.random.default_rng(2))
        leaves = tree.feature == -1
        assert tree.class_counts[leaves].sum() == len(X)

    def test_input_validation(self):
        with pytest.raises(ValueError, match="binary"):
            fit_tree(np.ones((3, 1)), np.array([0, 1, 2]))
        with pytest.raises(ValueError, match="max_features"):
            fit_tree(np.ones((3, 2)), np.array([0, 1, 1]), max_features=5)


class TestFitForest:
    def test_single_feature_importance_is_one(self):
        X = np.array([[0.0], [1.0], [0.2], [0.9]])
        y = np.array([0, 1, 0, 1])
        forest = fit_forest(X, y, n_trees=5, seed=0)
        assert np.allclose(forest.feature_importances, [1.0])

    def test_importances_sum_to_one(self):
        X, y = separable_data(n=150, d=6, seed=3)
        forest = fit_forest(X, y, n_trees=20, seed=3)
        assert forest.feature_importances.sum() == pytest.approx(1.0)
        assert (forest.feature_importances >= 0).all()

    def test_same_seed_identical_forest(self):
        X, y = separable_data(n=100, d=6, seed=4)
        f1 = fit_forest(X, y, n_trees=10, seed=4)
        f2 = fit_forest(X, y, n_trees=10, seed=4)
        assert np.array_equal(f1.feature_importances, f2.feature_importances)
        for t1, t2 in zip(f1.trees, f2.trees):
            assert np.array_equal(t1.feature, t2.feature)
            assert np.array_equal(t1.threshold, t2.threshold, equal_nan=True)

    def test_informative_features_rank_top3_smoke(self):
        # 10-seed smoke version of the 100-seed acceptance run.
        hits = 0
        for seed in range(10):
            rng = np.random.default_rng(seed)
            X = rng.normal(0, 1, (300, 20))
            y = rng.integers(0, 2, 300)
            for j in (2, 7, 11):
                X[:, j] += np.where(y == 1, 1.0, -1.0)
            forest = fit_forest(X, y, n_trees=40, seed=seed)
            top3 = set(top_k_features(forest, 3))
            hits += top3 == {2, 7, 11}
        assert hits >= 9

    def test_n_trees_validation(self):
        with pytest.raises(ValueError, match="n_trees"):
            fit_forest(np.ones((2, 1)), np.array([0, 1]), n_trees=0)

    def test_monotone_transform_leaves_importances_unchanged(self):
        X, y = separable_data(n=150, d=5, seed=6)
        X = np.abs(X) + 0.5  # keep the cube strictly increasing and distinct
        Xt = X.copy()
        Xt[:, 2] = Xt[:, 2] ** 3
        f1 = fit_forest(X, y, n_trees=15, seed=6)
        f2 = fit_forest(Xt, y, n_trees=15, seed=6)
        assert np.array_equal(f1.feature_importances, f2.feature_importances)

    def test_single_tree_forest_equals_the_tree(self):
        from eegattn._rand import mask64

        X, y = separable_data(n=80, d=4, seed=8)
        forest = fit_forest(X, y, n_trees=1, max_features=2, seed=8)
        tree = fit_tree(X, y, max_features=2, rng=np.random.default_rng(mask64(8) ^ 0))
        labels, probs = predict(forest, X)
        assert np.allclose(probs, tree.predict_proba(X))


class TestPredict:
    def test_pure_leaf_region_probability_one(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([0, 1])
        forest = fit_forest(X, y, n_trees=3, seed=0)
        _, probs = predict(forest, X)
        assert np.allclose(probs, [[1.0, 0.0], [0.0, 1.0]])

    def test_single_leaf_forest_predicts_prior(self):
        X = np.ones((5, 2))
        y = np.array([0, 0, 0, 1, 1])
        forest = fit_forest(X, y, n_trees=4, seed=0)
        labels, probs = predict(forest, np.zeros((3, 2)))
        assert np.allclose(probs, [[0.6, 0.4]] * 3)
        assert labels.tolist() == [0, 0, 0]

    def test_tie_goes_to_class_zero(self):
        forest = fit_forest(np.ones((2, 1)), np.array([0, 1]), n_trees=2, seed=0)
        labels, probs = predict(forest, np.ones((1, 1)))
        assert np.allclose(probs, [[0.5, 0.5]])
        assert labels.tolist() == [0]

    def test_held_out_accuracy_on_separable_data(self):
        X, y = separable_data(n=400, d=5, seed=10, margin=1.0)
        Xte, yte = X[300:], y[300:]
        forest = fit_forest(X[:300], y[:300], n_trees=50, seed=10)
        labels, _ = predict(forest, Xte)
        assert (labels == yte).mean() >= 0.95

    def test_dimension_mismatch_rejected(self):
        forest = fit_forest(np.ones((2, 3)), np.array([0, 1]), n_trees=1, seed=0)
        with pytest.raises(ValueError, match="columns"):
            predict(forest, np.ones((2, 2)))


class TestTopK:
    def _forest_with_importances(self, imps):
        return RandomForest(
            trees=[],
            n_features=len(imps),
            max_features=1,
            bootstrap=False,
            seed=0,
            feature_importances=np.asarray(imps, dtype=float),
        )

    def test_direct_sort(self):
        forest = self._forest_with_importances([0.1, 0.7, 0.2])
        assert top_k_features(forest, 2) == [1, 2]

    def test_k_equals_d_is_a_permutation(self):
        forest = self._forest_with_importances([0.2, 0.5, 0.1, 0.2])
        assert sorted(top_k_features(forest, 4)) == [0, 1, 2, 3]

    def test_ties_break_by_ascending_index(self):
        forest = self._forest_with_importances([0.25, 0.25, 0.5])
        assert top_k_features(forest, 3) == [2, 0, 1]

    def test_k_too_large_rejected(self):
        forest = self._forest_with_importances([1.0])
        with pytest.raises(ValueError, match="k"):
            top_k_features(forest, 2)


class TestSerialization:
    def test_round_trip_preserves_predictions(self, tmp_path):
        X, y = separable_data(n=120, d=4, seed=12)
        forest = fit_forest(X, y, n_trees=8, seed=12)
        path = tmp_path / "forest.json"
        save_forest(forest, path)
        loaded = load_forest(path)
        l1, p1 = predict(forest, X)
        l2, p2 = predict(loaded, X)
        assert np.array_equal(l1, l2)
        assert np.array_equal(p1, p2)
        assert np.array_equal(
            forest.feature_importances, loaded.feature_importances
        )
