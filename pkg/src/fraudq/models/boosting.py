"""Newton-boosted trees on logistic loss.

Each round fits a depth-limited tree to the current gradients g = p - y and
hessians h = p(1 - p); leaves carry -sum(g) / (sum(h) + l2), scaled by the
shrinkage when accumulated. Splits maximize the second-order gain
0.5 * (GL^2/(HL+l2) + GR^2/(HR+l2) - G^2/(H+l2)) and must be positive.
"""

import math

import numpy as np

from .. import accel
from ..errors import SingleClassError
from .base import TrainedModel, register, sigmoid
from .tree import FlatTree, grow_tree


def _grow_newton_tree(X, g, h, *, max_depth, min_leaf, l2_leaf):
    def split_fn(sorted_values, order):
        return accel.best_split_newton(sorted_values, g[order], h[order], l2_leaf, min_leaf)

    def leaf_fn(rows):
        return float(-np.sum(g[rows]) / (np.sum(h[rows]) + l2_leaf))

    def pure_fn(rows):
        return False

    return grow_tree(
        X,
        np.arange(X.shape[0]),
        max_depth=max_depth,
        min_leaf=min_leaf,
        split_fn=split_fn,
        leaf_fn=leaf_fn,
        pure_fn=pure_fn,
        require_positive_gain=True,
    )


@register("xgb")
class GradientBoostedModel(TrainedModel):
    """sigmoid(base_score + shrinkage * sum of tree scores)."""

    def __init__(self, base_score, shrinkage, trees, n_features, loss_history=None):
        self.base_score = base_score
        self.shrinkage = shrinkage
        self.trees = trees
        self.n_features = n_features
        self.loss_history = loss_history or []

    @classmethod
    def fit(cls, X, y, rounds=100, depth=4, shrinkage=0.1, l2_leaf=1.0, min_leaf=1):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        positives = float(np.sum(y))
        if positives == 0 or positives == y.shape[0]:
            raise SingleClassError("boosting needs both classes present")
        base_score = math.log(positives / (y.shape[0] - positives))
        score = np.full(y.shape[0], base_score)
        trees = []
        losses = []
        for _ in range(rounds):
            p = sigmoid(score)
            g = p - y
            h = p * (1.0 - p)
            tree = _grow_newton_tree(
                X, g, h, max_depth=depth, min_leaf=min_leaf, l2_leaf=l2_leaf
            )
            trees.append(tree)
            score += shrinkage * tree.predict_value(X)
            p = np.clip(sigmoid(score), 1e-12, 1.0 - 1e-12)
            losses.append(float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))
        return cls(base_score, shrinkage, trees, X.shape[1], losses)

    def decision_scores(self, X):
        X = self.check_width(X, self.n_features)
        score = np.full(X.shape[0], self.base_score)
        for tree in self.trees:
            score += self.shrinkage * tree.predict_value(X)
        return score

    def predict_proba(self, X):
        return sigmoid(self.decision_scores(X))

    def to_payload(self):
        return {
            "base_score": self.base_score,
            "shrinkage": self.shrinkage,
            "n_features": self.n_features,
            "trees": [t.to_payload() for t in self.trees],
        }

    @classmethod
    def from_payload(cls, payload):
        trees = [FlatTree.from_payload(p) for p in payload["trees"]]
        return cls(payload["base_score"], payload["shrinkage"], trees, payload["n_features"])
