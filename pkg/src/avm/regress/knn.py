"""K-nearest-neighbor rent prediction (lazy learner, scaled feature space)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from .scaler import StandardScaler

_CHUNK = 256  # query rows per distance-matrix block


@dataclass
class KnnModel:
    scaler: StandardScaler
    train_X: np.ndarray  # scaled
    train_y: np.ndarray
    k: int


def fit_knn(X: np.ndarray, y: np.ndarray, k: int = 9) -> KnnModel:
    """Store scaled training data; no other computation happens at fit time."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ConfigError(f"k={k} must be within [1, n={n}]")
    scaler = StandardScaler.fit(X)
    return KnnModel(scaler=scaler, train_X=scaler.transform(X),
                    train_y=y.copy(), k=k)


def predict_knn(model: KnnModel, x) -> float:
    """Mean target of the k nearest training rows (ties: lower row index)."""
    return float(predict_knn_batch(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def predict_knn_batch(model: KnnModel, X) -> np.ndarray:
    Xs = model.scaler.transform(np.asarray(X, dtype=np.float64))
    out = np.empty(Xs.shape[0])
    train = model.train_X
    train_sq = (train * train).sum(axis=1)
    for start in range(0, Xs.shape[0], _CHUNK):
        chunk = Xs[start:start + _CHUNK]
        d2 = train_sq[None, :] - 2.0 * (chunk @ train.T) + (chunk * chunk).sum(axis=1)[:, None]
        # stable sort keeps the lower row index first on distance ties
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :model.k]
        out[start:start + _CHUNK] = model.train_y[nearest].mean(axis=1)
    return out
