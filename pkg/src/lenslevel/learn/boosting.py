"""Stage-wise boosting of shallow regression trees under logistic loss.

Each stage fits a depth-limited regression tree to the current negative
gradient (y - p) and adds its prediction scaled by the learning rate to
the running score; probabilities are the sigmoid of the summed scores,
starting from the log-odds of the training base rate.
"""

from __future__ import annotations

import numpy as np

from .trees import MSE, grow_tree


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _log_loss(y: np.ndarray, p: np.ndarray) -> float:
    eps = 1e-12
    p = np.clip(p, eps, 1.0 - eps)
    return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))


class GradientBoostingClassifier:
    def __init__(self, n_stages=100, max_depth=3, learning_rate=0.1,
                 min_samples_split=2, seed=0):
        self.n_stages = int(n_stages)
        self.max_depth = int(max_depth)
        self.learning_rate = float(learning_rate)
        self.min_samples_split = min_samples_split
        self.seed = int(seed)  # kept for the ModelSpec contract; fitting is deterministic
        self.base_score_ = 0.0
        self.trees_ = []
        self.loss_path_ = []

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        base_rate = float(y.mean())
        if base_rate <= 0.0 or base_rate >= 1.0:
            raise ValueError("gradient boosting needs both classes in the training data")
        self.base_score_ = float(np.log(base_rate / (1.0 - base_rate)))
        self.trees_ = []
        self.loss_path_ = []

        scores = np.full(y.shape[0], self.base_score_)
        self.loss_path_.append(_log_loss(y, _sigmoid(scores)))
        for _ in range(self.n_stages):
            residual = y - _sigmoid(scores)
            tree = grow_tree(X, residual, criterion=MSE,
                             min_samples_split=self.min_samples_split,
                             max_depth=self.max_depth)
            scores += self.learning_rate * tree.predict(X)
            self.trees_.append(tree)
            self.loss_path_.append(_log_loss(y, _sigmoid(scores)))
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        scores = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            scores += self.learning_rate * tree.predict(X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
