"""Random forest: bagged Gini trees with per-split feature subsampling."""

import math

import numpy as np

from .base import TrainedModel, register
from .tree import FlatTree, grow_gini_tree


@register("rf")
class RandomForestModel(TrainedModel):
    """Mean of per-tree probabilities over bootstrap-trained CART trees."""

    def __init__(self, trees, n_features):
        self.trees = trees
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, n_trees=100, features_per_split=None, max_depth=12, min_leaf=5,
            seed=0, bootstrap=True):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        y = np.asarray(y, dtype=np.float64)
        n, d = X.shape
        if features_per_split is None:
            features_per_split = math.ceil(math.sqrt(d))
        trees = []
        for t in range(n_trees):
            rng = np.random.default_rng([seed, t])
            rows = rng.integers(0, n, size=n) if bootstrap else np.arange(n)
            sample_x = X[rows]
            sample_y = y[rows]
            trees.append(
                grow_gini_tree(
                    sample_x,
                    sample_y,
                    max_depth=max_depth,
                    min_leaf=min_leaf,
                    features_per_split=features_per_split,
                    rng=rng,
                )
            )
        return cls(trees, d)

    def predict_proba(self, X):
        X = self.check_width(X, self.n_features)
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            total += tree.predict_value(X)
        return total / len(self.trees)

    def to_payload(self):
        return {"n_features": self.n_features, "trees": [t.to_payload() for t in self.trees]}

    @classmethod
    def from_payload(cls, payload):
        trees = [FlatTree.from_payload(p) for p in payload["trees"]]
        return cls(trees, payload["n_features"])
