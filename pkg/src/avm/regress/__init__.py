"""Five single-property valuation algorithms over the 11-value feature vector.

The ``ALGORITHMS`` registry maps the CLI/API names to (fit, predict) pairs
sharing one calling convention: ``fit(X, y, seed)`` and ``predict(model, X)``
returning an array of rent predictions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..listings import FEATURE_NAMES
from .forest import (
    ForestModel,
    RegressionTree,
    fit_random_forest,
    grow_tree,
    predict_forest,
    predict_forest_batch,
)
from .io import load_model, save_model
from .knn import KnnModel, fit_knn, predict_knn, predict_knn_batch
from .linear import LinearModel, fit_bayesian_ridge, fit_ols, predict_linear
from .localpoly import (
    LocalPolyModel,
    basis_size,
    fit_local_poly,
    predict_local_poly,
    predict_local_poly_batch,
)
from .scaler import StandardScaler

__all__ = [
    "ALGORITHMS", "AlgoSpec", "ForestModel", "KnnModel", "LinearModel",
    "LocalPolyModel", "RegressionTree", "StandardScaler", "basis_size",
    "fit_bayesian_ridge", "fit_knn", "fit_local_poly", "fit_ols",
    "fit_random_forest", "grow_tree", "load_model", "predict_forest",
    "predict_forest_batch", "predict_knn", "predict_knn_batch",
    "predict_linear", "predict_local_poly", "predict_local_poly_batch",
    "save_model",
]


@dataclass
class AlgoSpec:
    name: str
    fit: Callable      # (X, y, seed) -> model
    predict: Callable  # (model, X) -> predictions


def _onehot_dims_for(X) -> tuple:
    # the standard pipeline one-hot block; generic fixtures have none
    return (0, 1, 2, 3) if X.shape[1] == len(FEATURE_NAMES) else ()


def _predict_linear_batch(model, X):
    return np.asarray(predict_linear(model, np.atleast_2d(X)), dtype=np.float64)


ALGORITHMS = {
    "knn": AlgoSpec("knn", lambda X, y, seed: fit_knn(X, y, k=min(9, len(y))),
                    predict_knn_batch),
    "rf": AlgoSpec("rf", lambda X, y, seed: fit_random_forest(X, y, n_trees=80, seed=seed),
                   predict_forest_batch),
    "ols": AlgoSpec("ols", lambda X, y, seed: fit_ols(X, y), _predict_linear_batch),
    "bridge": AlgoSpec("bridge", lambda X, y, seed: fit_bayesian_ridge(X, y),
                       _predict_linear_batch),
    "lp1": AlgoSpec("lp1", lambda X, y, seed: fit_local_poly(X, y, 1, _onehot_dims_for(X)),
                    predict_local_poly_batch),
    "lp2": AlgoSpec("lp2", lambda X, y, seed: fit_local_poly(X, y, 2, _onehot_dims_for(X)),
                    predict_local_poly_batch),
    "lp3": AlgoSpec("lp3", lambda X, y, seed: fit_local_poly(X, y, 3, _onehot_dims_for(X)),
                    predict_local_poly_batch),
}
