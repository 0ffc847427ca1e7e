"""Random forest regression: bagged CART trees grown to purity.

Trees are exact CART: candidate thresholds are the midpoints between
consecutive sorted unique feature values, and the split minimizing the
weighted sum of squared errors wins. Growing is iterative with the split
search vectorized across all features of a node at once.

Reproducibility: training rows are put into a canonical content order
(lexicographic over features then target) before any bootstrap draw, and
each tree draws from a generator seeded by (master seed, tree index). A
forest therefore does not depend on the order rows arrived in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

MAX_FEATURES_ALL = "all"
MAX_FEATURES_SQRT = "sqrt"
MAX_FEATURES_THIRD = "third"

_SSE_EPS = 1e-12  # a split must beat the parent SSE by more than this


@dataclass
class RegressionTree:
    """Flat-array binary tree; feature == -1 marks a leaf."""

    feature: np.ndarray    # int32 per node
    threshold: np.ndarray  # float64 per node
    left: np.ndarray       # int32 child ids
    right: np.ndarray
    value: np.ndarray      # float64 leaf/node mean target
    n_samples: np.ndarray  # int32 training rows that reached the node


@dataclass
class ForestModel:
    n_trees: int
    trees: list
    bootstrap_seed: int
    min_samples_leaf: int
    max_features_policy: str
    bootstrap: bool = True
    n_features: int = 0
    meta: dict = field(default_factory=dict)


def _n_candidate_features(policy: str, d: int) -> int:
    if policy == MAX_FEATURES_ALL:
        return d
    if policy == MAX_FEATURES_SQRT:
        return max(1, int(np.sqrt(d)))
    if policy == MAX_FEATURES_THIRD:
        return max(1, d // 3)
    raise ValueError(f"unknown max_features policy {policy!r}")


def grow_tree(X: np.ndarray, y: np.ndarray, min_samples_leaf: int = 1,
              max_features_policy: str = MAX_FEATURES_ALL,
              rng: Optional[np.random.Generator] = None) -> RegressionTree:
    """Grow one CART regression tree (greedy SSE minimization)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    n_cand = _n_candidate_features(max_features_policy, d)

    feature, threshold, left, right, value, n_samples = [], [], [], [], [], []

    def new_node(rows):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(float(y[rows].mean()))
        n_samples.append(rows.size)
        return len(feature) - 1

    root = new_node(np.arange(n))
    stack = [(np.arange(n), root)]
    while stack:
        rows, node = stack.pop()
        yn = y[rows]
        m = rows.size
        if m < 2 * min_samples_leaf or m < 2 or np.all(yn == yn[0]):
            continue
        if n_cand < d:
            cand = np.sort(rng.choice(d, size=n_cand, replace=False))
        else:
            cand = np.arange(d)
        Xn = X[np.ix_(rows, cand)]

        order = np.argsort(Xn, axis=0, kind="stable")
        Xs = np.take_along_axis(Xn, order, axis=0)
        ys = yn[order]
        csum = np.cumsum(ys, axis=0)
        csq = np.cumsum(ys * ys, axis=0)
        tot_sum = csum[-1]
        tot_sq = csq[-1]
        nl = np.arange(1, m, dtype=np.float64)[:, None]
        nr = m - nl
        sl, ql = csum[:-1], csq[:-1]
        sse = (ql - sl * sl / nl) + ((tot_sq - ql) - (tot_sum - sl) ** 2 / nr)
        ok = Xs[:-1] < Xs[1:]
        if min_samples_leaf > 1:
            ok &= (nl >= min_samples_leaf) & (nr >= min_samples_leaf)
        sse = np.where(ok, sse, np.inf)

        flat = int(np.argmin(sse))
        i, j = divmod(flat, sse.shape[1])
        best = sse[i, j]
        parent_sse = float(yn @ yn) - float(yn.sum()) ** 2 / m
        if not np.isfinite(best) or best >= parent_sse - _SSE_EPS:
            continue

        fidx = int(cand[j])
        t = 0.5 * (Xs[i, j] + Xs[i + 1, j])
        go_left = X[rows, fidx] <= t
        feature[node] = fidx
        threshold[node] = t
        ln = new_node(rows[go_left])
        rn = new_node(rows[~go_left])
        left[node], right[node] = ln, rn
        stack.append((rows[go_left], ln))
        stack.append((rows[~go_left], rn))

    return RegressionTree(
        feature=np.asarray(feature, dtype=np.int32),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int32),
        right=np.asarray(right, dtype=np.int32),
        value=np.asarray(value, dtype=np.float64),
        n_samples=np.asarray(n_samples, dtype=np.int32),
    )


def fit_random_forest(X: np.ndarray, y: np.ndarray, n_trees: int = 80,
                      seed: int = 0, min_samples_leaf: int = 1,
                      max_features_policy: str = MAX_FEATURES_ALL,
                      bootstrap: bool = True) -> ForestModel:
    """Fit a bagged forest of exact CART trees.

    Defaults mirror the classic library settings: all features per split,
    leaves down to one row, no depth cap, bootstrap resampling on.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, d = X.shape
    if n == 0:
        raise ValueError("cannot fit a forest on zero rows")

    # canonical content order, so the forest is row-order independent
    keys = (y,) + tuple(X[:, j] for j in range(d - 1, -1, -1))
    canon = np.lexsort(keys)
    Xc, yc = X[canon], y[canon]

    trees = []
    for t in range(n_trees):
        rng = np.random.default_rng(
            np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, t]))
        rows = rng.integers(0, n, n) if bootstrap else np.arange(n)
        trees.append(grow_tree(Xc[rows], yc[rows],
                               min_samples_leaf=min_samples_leaf,
                               max_features_policy=max_features_policy,
                               rng=rng))
    return ForestModel(
        n_trees=n_trees, trees=trees, bootstrap_seed=seed,
        min_samples_leaf=min_samples_leaf,
        max_features_policy=max_features_policy,
        bootstrap=bootstrap, n_features=d,
        meta={"max_depth": None, "thresholds": "midpoints-exact"},
    )


def predict_tree_batch(tree: RegressionTree, X: np.ndarray) -> np.ndarray:
    pos = np.zeros(X.shape[0], dtype=np.int32)
    while True:
        feat = tree.feature[pos]
        active = np.flatnonzero(feat >= 0)
        if active.size == 0:
            return tree.value[pos]
        p = pos[active]
        go_left = X[active, tree.feature[p]] <= tree.threshold[p]
        pos[active] = np.where(go_left, tree.left[p], tree.right[p])


def predict_forest(model: ForestModel, x) -> float:
    """Mean of the per-tree leaf predictions for one query."""
    return float(predict_forest_batch(model, np.asarray(x, dtype=np.float64)[None, :])[0])


def predict_forest_batch(model: ForestModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    acc = np.zeros(X.shape[0])
    for tree in model.trees:
        acc += predict_tree_batch(tree, X)
    return acc / len(model.trees)
