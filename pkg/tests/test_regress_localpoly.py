import numpy as np
import pytest

from avm.errors import ConfigError
from avm.regress import basis_size, fit_local_poly, predict_local_poly, predict_local_poly_batch


class TestExactRecovery:
    """Noise-free polynomial data must be reproduced below 1e-6 error."""

    def _poly_data(self, order, seed=0, n=400, d=2):
        rng = np.random.default_rng(seed)
        X = rng.uniform(-1, 1, size=(n, d))
        coef1 = rng.normal(size=d)

        def truth(Q):
            Q = np.atleast_2d(Q)
            out = 3.0 + Q @ coef1
            if order >= 2:
                out = out + 1.5 * Q[:, 0] ** 2 - 0.8 * Q[:, 0] * Q[:, 1 % d]
            if order >= 3:
                out = out + 0.6 * Q[:, 0] ** 3
            return out

        return X, truth(X), truth

    @pytest.mark.parametrize("order", [1, 2, 3])
    def test_interior_prediction_error_under_1e6(self, order):
        X, y, truth = self._poly_data(order)
        model = fit_local_poly(X, y, order=order)
        rng = np.random.default_rng(order)
        queries = rng.uniform(-0.5, 0.5, size=(25, X.shape[1]))
        for q in queries:
            assert abs(predict_local_poly(model, q) - truth(q)[0]) < 1e-6


class TestDegenerate:
    def test_constant_target_every_order(self):
        rng = np.random.default_rng(1)
        X = rng.uniform(-2, 2, size=(200, 3))
        y = np.full(200, 9.75)
        for order in (1, 2, 3):
            model = fit_local_poly(X, y, order=order)
            assert predict_local_poly(model, X[0]) == pytest.approx(9.75, abs=1e-9)
            assert predict_local_poly(model, [5.0, 5.0, 5.0]) == pytest.approx(9.75, abs=1e-6)

    def test_invalid_order_rejected(self):
        with pytest.raises(ConfigError):
            fit_local_poly(np.ones((10, 1)), np.ones(10), order=4)

    def test_tiny_training_set_cascades_down_to_a_fittable_order(self):
        # two rows cannot support the cubic or quadratic basis; order 1 can
        X = np.array([[0.0], [1.0]])
        y = np.array([2.0, 4.0])
        model = fit_local_poly(X, y, order=3)
        assert predict_local_poly(model, [0.0]) == pytest.approx(2.0, abs=1e-6)

    def test_single_row_falls_back_to_weighted_mean(self):
        model = fit_local_poly(np.array([[1.0]]), np.array([7.0]), order=1)
        assert predict_local_poly(model, [3.0]) == pytest.approx(7.0)


def test_order2_beats_order1_on_quadratic():
    rng = np.random.default_rng(2)
    X = rng.uniform(-1, 1, size=(300, 1))
    y = X[:, 0] ** 2
    q = np.array([0.5])
    err1 = abs(predict_local_poly(fit_local_poly(X, y, 1), q) - 0.25)
    err2 = abs(predict_local_poly(fit_local_poly(X, y, 2), q) - 0.25)
    assert err2 < err1


def test_one_hot_dims_enter_linearly_only():
    # group offset plus quadratic trend: order-2 with one-hot dims declared
    rng = np.random.default_rng(3)
    flag = rng.integers(0, 2, 300)
    x = rng.uniform(-1, 1, 300)
    X = np.column_stack([flag.astype(float), 1.0 - flag, x])
    y = 5.0 * flag + x ** 2
    model = fit_local_poly(X, y, order=2, onehot_dims=(0, 1))
    assert basis_size(2, 1, 2) == 1 + 2 + 1 + 1  # const, two flags, x, x^2
    got = predict_local_poly(model, [1.0, 0.0, 0.5])
    assert got == pytest.approx(5.25, abs=1e-6)


def test_rescaling_features_leaves_predictions_unchanged():
    rng = np.random.default_rng(4)
    X = rng.uniform(-1, 1, size=(250, 2))
    y = 2.0 + X[:, 0] ** 2 + X[:, 1]
    queries = rng.uniform(-0.5, 0.5, size=(10, 2))
    base = predict_local_poly_batch(fit_local_poly(X, y, 2), queries)
    scale = np.array([100.0, 0.01])
    rescaled = predict_local_poly_batch(fit_local_poly(X * scale, y, 2),
                                        queries * scale)
    np.testing.assert_allclose(rescaled, base, atol=1e-9)


def test_deterministic():
    rng = np.random.default_rng(5)
    X = rng.uniform(-1, 1, size=(100, 2))
    y = rng.normal(size=100)
    a = predict_local_poly(fit_local_poly(X, y, 2), [0.1, 0.2])
    b = predict_local_poly(fit_local_poly(X, y, 2), [0.1, 0.2])
    assert a == b
