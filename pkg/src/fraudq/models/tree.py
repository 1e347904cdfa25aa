"""CART trees on flat arrays.

Nodes live in parallel arrays (feature -1 marks a leaf) so prediction walks
all rows level-by-level with numpy instead of per-row recursion. The split
search delegates to the accel kernels; candidate thresholds are midpoints of
consecutive distinct sorted values, ties resolved to the lowest feature index
then the lowest threshold.
"""

import numpy as np

from .. import accel
from .base import TrainedModel, register

LEAF = -1


class FlatTree:
    """Parallel-array tree; value holds a probability or a boosting score."""

    def __init__(self):
        self.feature = []
        self.threshold = []
        self.left = []
        self.right = []
        self.value = []

    def add_node(self):
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(0)
        self.right.append(0)
        self.value.append(0.0)
        return len(self.feature) - 1

    def freeze(self):
        self.feature = np.asarray(self.feature, dtype=np.int32)
        self.threshold = np.asarray(self.threshold, dtype=np.float64)
        self.left = np.asarray(self.left, dtype=np.int32)
        self.right = np.asarray(self.right, dtype=np.int32)
        self.value = np.asarray(self.value, dtype=np.float64)
        return self

    def predict_value(self, X):
        """Per-row leaf value by vectorized level-wise descent (rows at a
        leaf stay put while the rest keep walking)."""
        X = np.atleast_2d(X)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            walking = np.flatnonzero(self.feature[node] >= 0)
            if walking.size == 0:
                return self.value[node]
            at = node[walking]
            go_left = X[walking, self.feature[at]] <= self.threshold[at]
            node[walking] = np.where(go_left, self.left[at], self.right[at])

    def depth(self, node=0):
        if self.feature[node] == LEAF:
            return 0
        return 1 + max(self.depth(self.left[node]), self.depth(self.right[node]))

    def to_payload(self):
        return {
            "feature": self.feature.tolist() if not isinstance(self.feature, list) else self.feature,
            "threshold": list(map(float, self.threshold)),
            "left": list(map(int, self.left)),
            "right": list(map(int, self.right)),
            "value": list(map(float, self.value)),
        }

    @classmethod
    def from_payload(cls, payload):
        tree = cls()
        tree.feature = payload["feature"]
        tree.threshold = payload["threshold"]
        tree.left = payload["left"]
        tree.right = payload["right"]
        tree.value = payload["value"]
        return tree.freeze()


def grow_tree(X, rows, *, max_depth, min_leaf, split_fn, leaf_fn, pure_fn,
              features_per_split=None, rng=None, require_positive_gain=False):
    """Greedy top-down growth shared by the Gini and Newton criteria.

    split_fn(sorted_values, order) scores one feature column of a node;
    leaf_fn(rows) yields the stored value; pure_fn(rows) short-circuits
    further splitting. Nodes are processed in creation (BFS) order so any
    feature subsampling consumes the rng deterministically. Impure nodes take
    the best valid split even at zero gain (stops are depth, min_leaf and
    purity only) unless require_positive_gain prunes non-improving splits.
    """
    n_features = X.shape[1]
    tree = FlatTree()
    root = tree.add_node()
    queue = [(root, rows, 0)]
    while queue:
        node, node_rows, depth = queue.pop(0)
        tree.value[node] = leaf_fn(node_rows)
        if depth >= max_depth or node_rows.size < 2 * min_leaf or pure_fn(node_rows):
            continue
        if features_per_split is not None and features_per_split < n_features:
            candidates = np.sort(rng.choice(n_features, size=features_per_split, replace=False))
        else:
            candidates = range(n_features)
        best_gain = 0.0 if require_positive_gain else -np.inf
        best_feature = LEAF
        best_threshold = 0.0
        for f in candidates:
            column = X[node_rows, f]
            order = np.argsort(column, kind="stable")
            gain, threshold, ok = split_fn(column[order], node_rows[order])
            # strictly-greater keeps the lowest feature index on gain ties
            if ok and gain > best_gain:
                best_gain, best_feature, best_threshold = gain, f, threshold
        if best_feature == LEAF:
            continue
        go_left = X[node_rows, best_feature] <= best_threshold
        left_rows = node_rows[go_left]
        right_rows = node_rows[~go_left]
        if left_rows.size < min_leaf or right_rows.size < min_leaf:
            continue
        tree.feature[node] = best_feature
        tree.threshold[node] = best_threshold
        left = tree.add_node()
        right = tree.add_node()
        tree.left[node] = left
        tree.right[node] = right
        queue.append((left, left_rows, depth + 1))
        queue.append((right, right_rows, depth + 1))
    return tree.freeze()


def grow_gini_tree(X, y, *, max_depth, min_leaf, features_per_split=None, rng=None):
    y = np.asarray(y, dtype=np.float64)

    def split_fn(sorted_values, order):
        return accel.best_split_gini(sorted_values, y[order], min_leaf)

    def leaf_fn(rows):
        return float(np.mean(y[rows]))

    def pure_fn(rows):
        first = y[rows[0]]
        return bool(np.all(y[rows] == first))

    return grow_tree(
        X,
        np.arange(X.shape[0]),
        max_depth=max_depth,
        min_leaf=min_leaf,
        split_fn=split_fn,
        leaf_fn=leaf_fn,
        pure_fn=pure_fn,
        features_per_split=features_per_split,
        rng=rng,
    )


@register("dt")
class DecisionTreeModel(TrainedModel):
    """Single Gini CART tree; leaf value is the training positive fraction."""

    def __init__(self, tree, n_features):
        self.tree = tree
        self.n_features = n_features

    @classmethod
    def fit(cls, X, y, max_depth=12, min_leaf=5):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        tree = grow_gini_tree(X, y, max_depth=max_depth, min_leaf=min_leaf)
        return cls(tree, X.shape[1])

    def predict_proba(self, X):
        X = self.check_width(X, self.n_features)
        return self.tree.predict_value(X)

    def to_payload(self):
        return {"n_features": self.n_features, "tree": self.tree.to_payload()}

    @classmethod
    def from_payload(cls, payload):
        return cls(FlatTree.from_payload(payload["tree"]), payload["n_features"])
