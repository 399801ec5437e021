"""Bagged Gini trees with per-split feature subsampling."""

from __future__ import annotations

import math

import numpy as np

from .trees import GINI, grow_tree

_U64 = 0xFFFFFFFFFFFFFFFF


def _tree_rng(seed: int, index: int) -> np.random.Generator:
    # per-tree stream derived from (seed, index): parallel and serial
    # fitting would consume identical randomness
    return np.random.default_rng(np.random.SeedSequence([seed & _U64, index]))


class RandomForestClassifier:
    def __init__(self, n_trees=100, max_features="sqrt", bootstrap=True,
                 max_depth=None, min_samples_split=2, seed=0):
        self.n_trees = int(n_trees)
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.seed = int(seed)
        self.trees_ = []

    def _resolve_max_features(self, d: int):
        if self.max_features is None:
            return d
        if self.max_features == "sqrt":
            return max(1, math.floor(math.sqrt(d)))
        return max(1, min(int(self.max_features), d))

    def fit(self, X, y):
        X = np.ascontiguousarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.shape[0] == 0:
            raise ValueError("empty training set")
        n, d = X.shape
        m = self._resolve_max_features(d)
        self.trees_ = []
        for t in range(self.n_trees):
            rng = _tree_rng(self.seed, t)
            if self.bootstrap:
                sample = rng.integers(0, n, n).astype(np.int64)
            else:
                sample = np.arange(n, dtype=np.int64)
            kernel_seed = int(rng.integers(0, 2**31 - 1))
            self.trees_.append(
                grow_tree(X, y, sample_idx=sample, criterion=GINI,
                          max_features=m, min_samples_split=self.min_samples_split,
                          max_depth=self.max_depth, rng_seed=kernel_seed)
            )
        return self

    def predict_proba(self, X) -> np.ndarray:
        """Mean of per-tree leaf positive-class frequencies."""
        X = np.ascontiguousarray(X, dtype=np.float64)
        acc = np.zeros(X.shape[0], dtype=np.float64)
        for tree in self.trees_:
            acc += tree.predict(X)
        return acc / len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
