"""Gaussian naive Bayes with log-sum-exp posteriors."""

from __future__ import annotations

import numpy as np


class GaussianNBClassifier:
    def __init__(self, var_floor=1e-9):
        self.var_floor = float(var_floor)
        self.classes_ = None
        self.theta_ = None   # (2, d) per-class feature means
        self.var_ = None     # (2, d) per-class feature variances, floored
        self.log_prior_ = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        if self.classes_.shape[0] != 2:
            raise ValueError("training data must contain exactly two classes")
        theta, var, prior = [], [], []
        for cls in self.classes_:
            Xc = X[y == cls]
            theta.append(Xc.mean(axis=0))
            var.append(np.maximum(Xc.var(axis=0), self.var_floor))
            prior.append(Xc.shape[0] / X.shape[0])
        self.theta_ = np.array(theta)
        self.var_ = np.array(var)
        self.log_prior_ = np.log(np.array(prior))
        return self

    def _joint_log_likelihood(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        jll = np.empty((X.shape[0], 2))
        for c in range(2):
            log_det = np.sum(np.log(2.0 * np.pi * self.var_[c]))
            sq = np.sum((X - self.theta_[c]) ** 2 / self.var_[c], axis=1)
            jll[:, c] = self.log_prior_[c] - 0.5 * (log_det + sq)
        return jll

    def predict_proba(self, X) -> np.ndarray:
        """P(positive class), normalized with log-sum-exp."""
        jll = self._joint_log_likelihood(X)
        m = jll.max(axis=1, keepdims=True)
        log_norm = m[:, 0] + np.log(np.sum(np.exp(jll - m), axis=1))
        return np.exp(jll[:, 1] - log_norm)

    def posterior(self, X) -> np.ndarray:
        """Both class posteriors, rows summing to 1."""
        jll = self._joint_log_likelihood(X)
        m = jll.max(axis=1, keepdims=True)
        log_norm = m + np.log(np.sum(np.exp(jll - m), axis=1, keepdims=True))
        return np.exp(jll - log_norm)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)
