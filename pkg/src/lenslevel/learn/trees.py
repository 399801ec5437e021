"""CART-style binary trees, the shared core of the forest and booster.

The split search is compiled with numba so unlimited-depth forests stay
fast at dataset scale. Determinism contract: candidate features are
scanned in ascending index order and thresholds in ascending value order
with strict-improvement comparisons, so equal-quality splits resolve to
the lowest feature index, then the lowest threshold.
"""

from __future__ import annotations

import numpy as np
from numba import njit

GINI = 0
MSE = 1

_MIN_GAIN = 1e-12


@njit(cache=True)
def _subsample_features(d, m):
    # partial Fisher-Yates; result sorted ascending for the tie-break rule
    pool = np.arange(d)
    for i in range(m):
        j = i + np.random.randint(0, d - i)
        tmp = pool[i]
        pool[i] = pool[j]
        pool[j] = tmp
    return np.sort(pool[:m])


@njit(cache=True)
def _build_tree(X, y, sample_idx, criterion, max_features, min_samples_split,
                max_depth, rng_seed):
    """Grow one tree; returns (feature, threshold, left, right, value) arrays.

    Leaves keep feature = -1. value is the positive-class fraction for
    GINI and the target mean for MSE. max_depth < 0 means unlimited.
    """
    np.random.seed(rng_seed)
    n_total = sample_idx.shape[0]
    d = X.shape[1]
    cap = 2 * n_total + 1
    feature = np.full(cap, -1, np.int64)
    threshold = np.zeros(cap, np.float64)
    left = np.full(cap, -1, np.int64)
    right = np.full(cap, -1, np.int64)
    value = np.zeros(cap, np.float64)

    idx = sample_idx.copy()
    stack = np.zeros((cap, 4), np.int64)  # node, start, end, depth
    stack[0, 0] = 0
    stack[0, 1] = 0
    stack[0, 2] = n_total
    stack[0, 3] = 0
    top = 1
    n_nodes = 1

    vals = np.empty(n_total, np.float64)
    tmp = np.empty(n_total, np.int64)

    while top > 0:
        top -= 1
        node = stack[top, 0]
        start = stack[top, 1]
        end = stack[top, 2]
        depth = stack[top, 3]
        n = end - start

        total = 0.0
        for i in range(start, end):
            total += y[idx[i]]
        value[node] = total / n

        if n < min_samples_split:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue
        if criterion == GINI and (total == 0.0 or total == n):
            continue

        if max_features < d:
            feats = _subsample_features(d, max_features)
        else:
            feats = np.arange(d)

        if criterion == GINI:
            p = total / n
            parent_score = 1.0 - (p * p + (1.0 - p) * (1.0 - p))
        else:
            parent_score = 0.0  # variance gain is computed from sums directly

        best_gain = _MIN_GAIN
        best_feature = -1
        best_threshold = 0.0
        for fj in range(feats.shape[0]):
            f = feats[fj]
            for i in range(n):
                vals[i] = X[idx[start + i], f]
            order = np.argsort(vals[:n])
            left_sum = 0.0
            for s in range(1, n):
                left_sum += y[idx[start + order[s - 1]]]
                v_prev = vals[order[s - 1]]
                v_next = vals[order[s]]
                if v_prev == v_next:
                    continue
                nl = s
                nr = n - s
                if criterion == GINI:
                    pl = left_sum / nl
                    pr = (total - left_sum) / nr
                    child = (nl * (1.0 - (pl * pl + (1.0 - pl) * (1.0 - pl)))
                             + nr * (1.0 - (pr * pr + (1.0 - pr) * (1.0 - pr)))) / n
                    gain = parent_score - child
                else:
                    rs = total - left_sum
                    gain = (left_sum * left_sum / nl + rs * rs / nr
                            - total * total / n) / n
                if gain > best_gain:
                    best_gain = gain
                    best_feature = f
                    # midpoint can round up onto v_next for adjacent floats,
                    # which would empty the right child; fall back to v_prev
                    mid = (v_prev + v_next) / 2.0
                    best_threshold = v_prev if mid >= v_next else mid

        if best_feature < 0:
            continue

        # stable in-place partition of idx[start:end] around the split
        nl = 0
        for i in range(start, end):
            if X[idx[i], best_feature] <= best_threshold:
                tmp[nl] = idx[i]
                nl += 1
        nr = nl
        for i in range(start, end):
            if X[idx[i], best_feature] > best_threshold:
                tmp[nr] = idx[i]
                nr += 1
        for i in range(n):
            idx[start + i] = tmp[i]

        feature[node] = best_feature
        threshold[node] = best_threshold
        left_id = n_nodes
        right_id = n_nodes + 1
        n_nodes += 2
        left[node] = left_id
        right[node] = right_id
        stack[top, 0] = left_id
        stack[top, 1] = start
        stack[top, 2] = start + nl
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = right_id
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1

    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes],
            right[:n_nodes], value[:n_nodes])


@njit(cache=True)
def _predict_tree(feature, threshold, left, right, value, X):
    out = np.empty(X.shape[0], np.float64)
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


class Tree:
    """Fitted tree; value semantics depend on the growing criterion."""

    def __init__(self, arrays):
        self.feature, self.threshold, self.left, self.right, self.value = arrays

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        return _predict_tree(self.feature, self.threshold, self.left,
                             self.right, self.value, X)


def grow_tree(X, y, sample_idx=None, criterion=GINI, max_features=None,
              min_samples_split=2, max_depth=None, rng_seed=0) -> Tree:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if X.shape[0] == 0:
        raise ValueError("cannot grow a tree on an empty sample")
    if sample_idx is None:
        sample_idx = np.arange(X.shape[0], dtype=np.int64)
    else:
        sample_idx = np.ascontiguousarray(sample_idx, dtype=np.int64)
    d = X.shape[1]
    m = d if max_features is None else min(int(max_features), d)
    if m < 1:
        raise ValueError("max_features must be >= 1")
    depth = -1 if max_depth is None else int(max_depth)
    arrays = _build_tree(X, y, sample_idx, criterion, m,
                         int(min_samples_split), depth, int(rng_seed))
    return Tree(arrays)


class DecisionTreeClassifier:
    """Plain Gini tree over all features; the single-tree forest baseline."""

    def __init__(self, max_depth=None, min_samples_split=2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.tree_ = None

    def fit(self, X, y):
        y = np.asarray(y, dtype=np.float64)
        self.tree_ = grow_tree(X, y, criterion=GINI, max_features=None,
                               min_samples_split=self.min_samples_split,
                               max_depth=self.max_depth)
        return self

    def predict_proba(self, X) -> np.ndarray:
        """Positive-class frequency of the leaf each row lands in."""
        return self.tree_.predict(X)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
