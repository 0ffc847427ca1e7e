"""Weighted local polynomial regression (lazy, per-query fits).

Every prediction solves a small weighted least-squares problem around the
query point:

* Gaussian kernel weights w_i = exp(-||x_i - x||^2 / (2 h^2)) in z-scored
  feature space, with the bandwidth h adapting to the local density: h is
  the distance from the query to its pilot-k-th nearest training point,
  pilot k = max(30, 3 * basis size).
* The basis holds all monomials of total degree <= order over the
  continuous features; one-hot indicator dimensions only enter linearly.
  Monomials are built on (x_i - x), so the fitted intercept IS the
  prediction at x.
* A ridge jitter on the normal equations keeps near-singular local systems
  solvable. If the kernel support holds fewer points than the basis has
  columns, the order falls back by one, down to a plain weighted mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement

import numpy as np

from ..errors import ConfigError
from .scaler import StandardScaler

_SUPPORT_REL = 1e-10  # weights below max(w) * this do not count as support


@dataclass
class LocalPolyModel:
    scaler: StandardScaler
    train_X: np.ndarray  # scaled
    train_y: np.ndarray
    order: int
    onehot_dims: tuple = ()
    ridge_jitter: float = 1e-8
    pilot_k: int = 0     # 0 = derive from the basis size


def fit_local_poly(X, y, order: int, onehot_dims=(), ridge_jitter: float = 1e-8,
                   pilot_k: int = 0) -> LocalPolyModel:
    if order not in (1, 2, 3):
        raise ConfigError(f"polynomial order must be 1, 2 or 3, got {order}")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    scaler = StandardScaler.fit(X)
    return LocalPolyModel(scaler=scaler, train_X=scaler.transform(X),
                          train_y=y.copy(), order=order,
                          onehot_dims=tuple(onehot_dims),
                          ridge_jitter=ridge_jitter, pilot_k=pilot_k)


def basis_size(order: int, n_continuous: int, n_onehot: int) -> int:
    size = 1 + n_onehot
    for deg in range(1, order + 1):
        size += math.comb(n_continuous + deg - 1, deg)
    return size


def _basis_matrix(D: np.ndarray, cont_dims, onehot_dims, order: int) -> np.ndarray:
    """Monomial columns for the (already query-centered) offsets D."""
    cols = [np.ones(D.shape[0])]
    for j in onehot_dims:
        cols.append(D[:, j])
    for deg in range(1, order + 1):
        for combo in combinations_with_replacement(cont_dims, deg):
            col = D[:, combo[0]].copy()
            for j in combo[1:]:
                col *= D[:, j]
            cols.append(col)
    return np.column_stack(cols)


def predict_local_poly(model: LocalPolyModel, x) -> float:
    """Rent prediction at one query point."""
    xq = model.scaler.transform(np.asarray(x, dtype=np.float64)[None, :])[0]
    D = model.train_X - xq
    d2 = (D * D).sum(axis=1)

    n, dim = model.train_X.shape
    cont_dims = [j for j in range(dim) if j not in model.onehot_dims]

    b_size = basis_size(model.order, len(cont_dims), len(model.onehot_dims))
    pilot = model.pilot_k if model.pilot_k > 0 else max(30, 3 * b_size)
    pilot = min(pilot, n)
    d_sorted = np.sort(d2)
    h2 = d_sorted[pilot - 1]
    if h2 <= 0.0:  # query sits on duplicated training points
        positive = d_sorted[d_sorted > 0]
        h2 = positive[0] if positive.size else 1.0

    w = np.exp(-d2 / (2.0 * h2))
    support = int((w > w.max() * _SUPPORT_REL).sum())

    for order in range(model.order, 0, -1):
        b = basis_size(order, len(cont_dims), len(model.onehot_dims))
        if support < b:
            continue
        B = _basis_matrix(D, cont_dims, model.onehot_dims, order)
        Bw = B * w[:, None]
        jitter = model.ridge_jitter * np.eye(B.shape[1])
        jitter[0, 0] = 0.0  # intercept unpenalized: constants reproduce exactly
        A = B.T @ Bw + jitter
        rhs = Bw.T @ model.train_y
        try:
            coef = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            continue
        return float(coef[0])

    return float((w @ model.train_y) / w.sum())


def predict_local_poly_batch(model: LocalPolyModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    return np.array([predict_local_poly(model, row) for row in X])
