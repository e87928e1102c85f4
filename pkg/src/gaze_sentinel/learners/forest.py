"""Bagged CART forest: Gini splits over random feature subsets, unlimited
depth, bootstrap per tree, majority-vote aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

_LEAF = -1


@dataclass
class TreeNodes:
    """Flat array representation of one binary tree.

    ``feature`` is -1 at leaves; ``value`` holds the leaf prediction. Rows
    route left when x[feature] < threshold.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def apply(self, X: np.ndarray) -> np.ndarray:
        idx = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            feat = self.feature[idx]
            internal = feat != _LEAF
            if not internal.any():
                break
            rows = np.flatnonzero(internal)
            node = idx[rows]
            goes_left = X[rows, feat[rows]] < self.threshold[node]
            idx[rows] = np.where(goes_left, self.left[node], self.right[node])
        return self.value[idx]


@dataclass
class ForestParams:
    trees: list = field(default_factory=list)
    n_features: int = 0


def _gini_split(X: np.ndarray, y: np.ndarray, cols: np.ndarray):
    """Best (feature, threshold) over candidate columns, or None.

    Vectorised scan of every midpoint between distinct consecutive sorted
    values; ties resolve to the first minimum in scan order.
    """
    m = y.shape[0]
    sub = X[:, cols]
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    ys = y[order]
    pos = np.cumsum(ys, axis=0, dtype=np.float64)
    total_pos = pos[-1]

    n_left = np.arange(1, m, dtype=np.float64)[:, None]
    pos_left = pos[:-1]
    n_right = m - n_left
    pos_right = total_pos[None, :] - pos_left
    pl = pos_left / n_left
    pr = pos_right / n_right
    cost = (n_left * (1.0 - pl * pl - (1.0 - pl) ** 2)
            + n_right * (1.0 - pr * pr - (1.0 - pr) ** 2)) / m
    cost[xs[1:] <= xs[:-1]] = np.inf

    flat = int(np.argmin(cost))
    i, j = divmod(flat, cost.shape[1])
    best = cost[i, j]
    if not np.isfinite(best):
        return None
    threshold = 0.5 * (xs[i, j] + xs[i + 1, j])
    return int(cols[j]), float(threshold), float(best)


def _node_impurity(y: np.ndarray) -> float:
    p = float(np.mean(y))
    return 1.0 - p * p - (1.0 - p) ** 2


def _majority(y: np.ndarray) -> float:
    # Exact tie breaks toward class 0.
    return 1.0 if 2 * int(y.sum()) > y.shape[0] else 0.0


def grow_cart(X: np.ndarray, y: np.ndarray, rng: np.random.Generator,
              max_features: int) -> TreeNodes:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(_LEAF)
        threshold.append(0.0)
        left.append(0)
        right.append(0)
        value.append(0.0)
        return len(feature) - 1

    root = new_node()
    stack = [(np.arange(X.shape[0]), root)]
    while stack:
        rows, slot = stack.pop()
        ys = y[rows]
        pos = int(ys.sum())
        if pos == 0 or pos == rows.shape[0] or rows.shape[0] < 2:
            value[slot] = _majority(ys)
            continue
        cols = rng.permutation(X.shape[1])[:max_features]
        split = _gini_split(X[rows], ys, cols)
        if split is None or split[2] >= _node_impurity(ys) - 1e-12:
            value[slot] = _majority(ys)
            continue
        f, thr, _ = split
        goes_left = X[rows, f] < thr
        feature[slot] = f
        threshold[slot] = thr
        l_slot, r_slot = new_node(), new_node()
        left[slot], right[slot] = l_slot, r_slot
        stack.append((rows[~goes_left], r_slot))
        stack.append((rows[goes_left], l_slot))

    return TreeNodes(
        feature=np.array(feature, dtype=np.int64),
        threshold=np.array(threshold, dtype=np.float64),
        left=np.array(left, dtype=np.int64),
        right=np.array(right, dtype=np.int64),
        value=np.array(value, dtype=np.float64),
    )


def fit_forest(X: np.ndarray, y: np.ndarray, n_trees: int, seed: int) -> ForestParams:
    n, d = X.shape
    max_features = min(d, math.ceil(math.sqrt(d)))
    children = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for child in children:
        rng = np.random.default_rng(child)
        boot = rng.integers(0, n, size=n)
        trees.append(grow_cart(X[boot], y[boot], rng, max_features))
    return ForestParams(trees=trees, n_features=d)


def predict_forest(params: ForestParams, X: np.ndarray) -> np.ndarray:
    """Fraction of trees voting class 1, in [0, 1]."""
    votes = np.zeros(X.shape[0], dtype=np.float64)
    for tree in params.trees:
        votes += tree.apply(X)
    return votes / max(len(params.trees), 1)
