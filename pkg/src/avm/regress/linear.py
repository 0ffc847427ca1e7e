"""Global linear baselines: ordinary least squares and Bayesian ridge.

Both fits standardize the design internally (center and scale columns,
center the target) and report raw-space weights with the intercept first.

The Bayesian ridge follows the evidence-maximization scheme: with prior
precision a on the weights and noise precision b, iterate

    m     = b (b X'X + a I)^-1 X'y
    gamma = sum_i  l_i / (l_i + a)          (l_i eigenvalues of b X'X)
    a    <- gamma / (m'm)
    b    <- (n - gamma) / ||y - X m||^2

until the relative change in a drops below tol. An SVD of the standardized
design makes every iteration O(d) once the decomposition is done.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import InsufficientDataError

OLS = "ols"
BAYESIAN_RIDGE = "bayesian_ridge"

_TINY = 1e-300


@dataclass
class LinearModel:
    weights: np.ndarray      # (d+1,), intercept first, raw feature space
    fit_kind: str
    alpha: Optional[float] = None  # weight-prior precision (Bayesian ridge)
    beta: Optional[float] = None   # noise precision (Bayesian ridge)
    converged: bool = True
    rank_deficient: bool = False
    n_iter: int = 0

    @property
    def intercept(self) -> float:
        return float(self.weights[0])

    @property
    def slopes(self) -> np.ndarray:
        return self.weights[1:]


def _standardize(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    xm = X.mean(axis=0)
    xs = X.std(axis=0)
    xs = np.where(xs == 0.0, 1.0, xs)
    return (X - xm) / xs, y - y.mean(), xm, xs, y.mean()


def _to_raw_space(w_std, xm, xs, ym):
    slopes = w_std / xs
    intercept = ym - slopes @ xm
    return np.concatenate([[intercept], slopes])


def fit_ols(X, y) -> LinearModel:
    """Least squares with intercept, solved via SVD (numpy lstsq).

    A rank-deficient design yields the minimum-norm solution (in the
    standardized space) and sets ``rank_deficient``.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if n <= d:
        raise InsufficientDataError(f"OLS needs n > d, got n={n}, d={d}")
    Xs, yc, xm, xs, ym = _standardize(X, y)
    w_std, _res, rank, _sv = np.linalg.lstsq(Xs, yc, rcond=None)
    return LinearModel(weights=_to_raw_space(w_std, xm, xs, ym),
                       fit_kind=OLS, rank_deficient=bool(rank < d))


def fit_bayesian_ridge(X, y, max_iter: int = 300, tol: float = 1e-4,
                       fixed_alpha: Optional[float] = None) -> LinearModel:
    """Evidence-maximization ridge; see the module docstring for the scheme.

    ``fixed_alpha`` pins the prior precision and skips its re-estimation
    (with a vanishing value the fit reduces to OLS), which is what the
    equivalence tests use.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n <= 2:
        raise InsufficientDataError(f"Bayesian ridge needs n > 2, got n={n}")
    Xs, yc, xm, xs, ym = _standardize(X, y)

    if np.allclose(yc, 0.0):  # constant target: zero slopes, intercept = mean
        return LinearModel(weights=_to_raw_space(np.zeros(d), xm, xs, ym),
                           fit_kind=BAYESIAN_RIDGE,
                           alpha=fixed_alpha if fixed_alpha is not None else np.inf,
                           beta=np.inf, converged=True)

    _u, s, vt = np.linalg.svd(Xs, full_matrices=False)
    uty = _u.T @ yc
    s2 = s * s

    var_y = yc.var()
    beta = 1.0 / var_y if var_y > 0 else 1.0
    alpha = fixed_alpha if fixed_alpha is not None else 1.0

    converged = False
    m = np.zeros(d)
    it = 0
    for it in range(1, max_iter + 1):
        lam = beta * s2
        m = vt.T @ ((beta * s / (lam + alpha)) * uty)
        gamma = float((lam / (lam + alpha)).sum())
        rss = float(((yc - Xs @ m) ** 2).sum())
        new_beta = (n - gamma) / max(rss, _TINY)
        if fixed_alpha is None:
            new_alpha = gamma / max(float(m @ m), _TINY)
            rel = abs(new_alpha - alpha) / max(alpha, _TINY)
            alpha, beta = new_alpha, new_beta
        else:
            rel = abs(new_beta - beta) / max(beta, _TINY)
            beta = new_beta
        if rel < tol:
            converged = True
            break

    return LinearModel(weights=_to_raw_space(m, xm, xs, ym),
                       fit_kind=BAYESIAN_RIDGE, alpha=float(alpha),
                       beta=float(beta), converged=converged, n_iter=it)


def predict_linear(model: LinearModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        return float(model.intercept + X @ model.slopes)
    return model.intercept + X @ model.slopes
