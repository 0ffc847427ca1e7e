import numpy as np
import pytest

from avm.errors import ConfigError
from avm.regress import fit_knn, predict_knn, predict_knn_batch


class TestFit:
    def test_targets_stored_verbatim(self):
        X = np.arange(12.0).reshape(6, 2)
        y = np.array([5.0, 4.0, 3.0, 2.0, 1.0, 0.0])
        model = fit_knn(X, y, k=2)
        np.testing.assert_array_equal(model.train_y, y)

    def test_k_equal_n_allowed_k_above_rejected(self):
        X = np.arange(10.0).reshape(5, 2)
        y = np.zeros(5)
        fit_knn(X, y, k=5)
        with pytest.raises(ConfigError):
            fit_knn(X, y, k=6)

    def test_scaling_uses_training_stats_only(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([0.0, 1.0, 2.0, 3.0])
        model = fit_knn(X, y, k=1)
        held_out = np.array([1000.0])
        before = model.scaler.mean.copy()
        predict_knn(model, held_out)
        np.testing.assert_array_equal(model.scaler.mean, before)
        assert model.scaler.mean[0] == 1.5  # training rows only


class TestPredict:
    def setup_method(self):
        self.X = np.array([[0.0, 0.0], [10.0, 10.0]])
        self.y = np.array([100.0, 200.0])

    def test_k1_nearest(self):
        model = fit_knn(self.X, self.y, k=1)
        assert predict_knn(model, [1.0, 1.0]) == 100.0

    def test_k2_mean(self):
        model = fit_knn(self.X, self.y, k=2)
        assert predict_knn(model, [1.0, 1.0]) == 150.0

    def test_tie_breaks_by_lower_row_index(self):
        X = np.array([[-1.0], [1.0], [3.0]])
        y = np.array([10.0, 20.0, 30.0])
        model = fit_knn(X, y, k=1)
        # query equidistant from rows 0 and 1
        assert predict_knn(model, [0.0]) == 10.0

    def test_brute_force_oracle_200_rows(self):
        rng = np.random.default_rng(17)
        X = rng.normal(size=(200, 11)) * rng.uniform(0.5, 20.0, 11)
        y = rng.uniform(500, 5000, 200)
        model = fit_knn(X, y, k=9)
        queries = rng.normal(size=(50, 11)) * rng.uniform(0.5, 20.0, 11)
        got = predict_knn_batch(model, queries)
        for q, g in zip(queries, got):
            assert g == _oracle_knn(model, q, k=9)


def _oracle_knn(model, query, k):
    """Plain full-scan KNN in scaled space, ties by row index."""
    qs = (query - model.scaler.mean) / model.scaler.std
    dists = [float(((row - qs) ** 2).sum()) for row in model.train_X]
    order = sorted(range(len(dists)), key=lambda i: (dists[i], i))[:k]
    return float(np.mean(model.train_y[order]))


def test_feature_rescaling_leaves_predictions_unchanged():
    rng = np.random.default_rng(23)
    X = rng.normal(size=(80, 4))
    y = rng.uniform(100, 1000, 80)
    queries = rng.normal(size=(10, 4))
    base = predict_knn_batch(fit_knn(X, y, k=5), queries)

    scale = np.array([3.0, 0.01, 100.0, 1.0])
    rescaled = predict_knn_batch(fit_knn(X * scale, y, k=5), queries * scale)
    np.testing.assert_allclose(rescaled, base, rtol=1e-12)


def test_prediction_within_target_range():
    rng = np.random.default_rng(29)
    X = rng.normal(size=(60, 3))
    y = rng.uniform(1000, 2000, 60)
    model = fit_knn(X, y, k=4)
    preds = predict_knn_batch(model, rng.normal(size=(200, 3)) * 5)
    assert np.all(preds >= y.min()) and np.all(preds <= y.max())
