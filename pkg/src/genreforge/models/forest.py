"""Gini decision trees and a bootstrap random forest built from them.

Trees are stored as flat node arrays (pre-order). A node with
``feature == -1`` is a leaf; otherwise rows with ``x[feature] <= threshold``
go to ``left``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, EmptyNode

LEAF = -1


def gini_impurity(class_counts) -> float:
    counts = np.asarray(class_counts, dtype=np.int64)
    n = int(counts.sum())
    if n < 1:
        raise EmptyNode("gini impurity of an empty node")
    # integer numerator/denominator keeps pure and balanced nodes exact
    return 1.0 - int((counts * counts).sum()) / (n * n)


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    counts: np.ndarray

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def is_leaf(self, node: int) -> bool:
        return self.feature[node] == LEAF

    def depth(self) -> int:
        deepest = 0
        stack = [(0, 0)]
        while stack:
            node, d = stack.pop()
            if self.is_leaf(node):
                deepest = max(deepest, d)
            else:
                stack.append((self.left[node], d + 1))
                stack.append((self.right[node], d + 1))
        return deepest

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        while True:
            feat = self.feature[node]
            active = feat != LEAF
            if not active.any():
                return node
            r, n, f = rows[active], node[active], feat[active]
            go_left = X[r, f] <= self.threshold[n]
            node[active] = np.where(go_left, self.left[n], self.right[n])

    def leaf_class(self) -> np.ndarray:
        # argmax picks the lower class index on ties
        return np.argmax(self.counts, axis=1)

    def predict(self, X) -> np.ndarray:
        return self.leaf_class()[self.apply(np.atleast_2d(X))]

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "counts": self.counts.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict, n_classes: int) -> "Tree":
        return cls(
            np.asarray(d["feature"], dtype=np.int64),
            np.asarray(d["threshold"], dtype=np.float64),
            np.asarray(d["left"], dtype=np.int64),
            np.asarray(d["right"], dtype=np.int64),
            np.asarray(d["counts"], dtype=np.int64).reshape(-1, n_classes),
        )


def _best_split(X, onehot, features):
    """Lowest weighted child Gini over midpoint thresholds of ``features``."""
    n = X.shape[0]
    total = onehot.sum(axis=0)
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    best = (math.inf, LEAF, 0.0)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        distinct = xs[:-1] < xs[1:]
        if not distinct.any():
            continue
        left = np.cumsum(onehot[order], axis=0)[:-1]
        right = total - left
        # n_l * gini_l + n_r * gini_r, divided by n
        weighted = (
            n_left - (left * left).sum(axis=1) / n_left
            + n_right - (right * right).sum(axis=1) / n_right
        ) / n
        weighted[~distinct] = math.inf
        i = int(np.argmin(weighted))
        if weighted[i] < best[0]:
            lo, hi = xs[i], xs[i + 1]
            mid = lo + (hi - lo) / 2.0
            if not lo <= mid < hi:
                mid = lo
            best = (float(weighted[i]), int(f), float(mid))
    return best


def tree_fit(X, y, n_classes: int, max_depth: int = 10, feature_subsample: int | None = None,
             rng=None) -> Tree:
    """Greedy Gini tree.

    At every node ``feature_subsample`` candidate features are drawn without
    replacement. Growth stops at ``max_depth``, on pure nodes, or when no
    candidate split lowers the impurity.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if X.shape[0] == 0:
        raise EmptyNode("cannot fit a tree on zero rows")
    rng = rng if rng is not None else np.random.default_rng()
    n_features = X.shape[1]
    m = n_features if feature_subsample is None else min(max(1, feature_subsample), n_features)
    onehot_all = np.eye(n_classes, dtype=np.float64)[y]

    feature, threshold, left, right, counts = [], [], [], [], []

    def grow(rows, depth):
        node = len(feature)
        node_counts = np.bincount(y[rows], minlength=n_classes)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        counts.append(node_counts)
        impurity = gini_impurity(node_counts)
        if depth >= max_depth or impurity == 0.0:
            return node
        candidates = rng.choice(n_features, size=m, replace=False)
        score, f, t = _best_split(X[rows], onehot_all[rows], candidates)
        if f == LEAF or not score < impurity - 1e-12:
            return node
        go_left = X[rows, f] <= t
        feature[node] = f
        threshold[node] = t
        left[node] = grow(rows[go_left], depth + 1)
        right[node] = grow(rows[~go_left], depth + 1)
        return node

    grow(np.arange(X.shape[0]), 0)
    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(counts, dtype=np.int64).reshape(-1, n_classes),
    )


@dataclass
class ForestModel:
    trees: list[Tree]
    n_classes: int
    n_features: int
    n_estimators: int = 1000
    max_depth: int = 10
    criterion: str = "gini"
    seed: int = 42

    def votes(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionMismatch(f"expected {self.n_features} features, got {X.shape[1]}")
        out = np.zeros((X.shape[0], self.n_classes), dtype=np.int64)
        rows = np.arange(X.shape[0])
        for tree in self.trees:
            np.add.at(out, (rows, tree.predict(X)), 1)
        return out

    def scores(self, X) -> np.ndarray:
        return self.votes(X) / len(self.trees)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.votes(X), axis=1)

    def get_params(self) -> dict:
        return {"trees": [t.to_dict() for t in self.trees]}

    def hyperparameters(self) -> dict:
        return {
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth,
            "criterion": self.criterion,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "n_features": self.n_features,
        }

    @classmethod
    def from_params(cls, hyper: dict, params: dict) -> "ForestModel":
        n_classes = int(hyper["n_classes"])
        return cls(
            trees=[Tree.from_dict(t, n_classes) for t in params["trees"]],
            n_classes=n_classes,
            n_features=int(hyper["n_features"]),
            n_estimators=int(hyper["n_estimators"]),
            max_depth=int(hyper["max_depth"]),
            criterion=hyper["criterion"],
            seed=int(hyper["seed"]),
        )


def forest_fit(train, n_estimators: int = 1000, max_depth: int = 10, seed: int = 42) -> ForestModel:
    """Bootstrap forest; tree ``t`` draws its sample and features from ``seed + t``."""
    n = len(train)
    if n == 0:
        raise ValueError("empty training set")
    X, y = train.features, train.labels
    m = max(1, math.isqrt(train.n_features))
    trees = []
    for t in range(n_estimators):
        rng = np.random.default_rng(seed + t)
        boot = rng.integers(0, n, size=n)
        trees.append(tree_fit(X[boot], y[boot], train.n_classes, max_depth, m, rng))
    return ForestModel(trees, train.n_classes, train.n_features, n_estimators, max_depth, "gini", seed)


def forest_predict(model: ForestModel, query) -> tuple[int, np.ndarray]:
    q = np.asarray(query, dtype=np.float64)
    if q.shape != (model.n_features,):
        raise DimensionMismatch(f"expected {model.n_features} features, got shape {q.shape}")
    votes = model.votes(q[None, :])[0]
    return int(np.argmax(votes)), votes
