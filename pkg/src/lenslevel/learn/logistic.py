"""L2-regularized logistic regression, batch gradient descent with Armijo steps.

Expects standardized inputs (the cross-validation harness standardizes
per training fold). The objective is the mean log-loss plus
l2/(2n) * ||coefficients||^2 with the intercept unpenalized; iteration
stops when the gradient max-norm drops below ``tol`` or after
``max_iter`` accepted steps.
"""

from __future__ import annotations

import numpy as np


def _sigmoid(z):
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class LogisticRegressionClassifier:
    def __init__(self, l2=1.0, tol=1e-6, max_iter=1000):
        self.l2 = float(l2)
        self.tol = float(tol)
        self.max_iter = int(max_iter)
        self.intercept_ = 0.0
        self.coef_ = None
        self.loss_path_ = []
        self.n_iter_ = 0

    def _loss_grad(self, w, Xb, y):
        n = Xb.shape[0]
        z = Xb @ w
        # log(1 + exp(-|z|)) formulation avoids overflow on either tail
        loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
        p = _sigmoid(z)
        grad = Xb.T @ (p - y) / n
        penalty = np.zeros_like(w)
        penalty[1:] = self.l2 / n * w[1:]
        loss += float(self.l2 / (2.0 * n) * np.sum(w[1:] ** 2))
        return loss, grad + penalty

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if not np.isfinite(X).all():
            raise ValueError("X contains non-finite values")
        n, d = X.shape
        Xb = np.hstack([np.ones((n, 1)), X])
        w = np.zeros(d + 1)
        loss, grad = self._loss_grad(w, Xb, y)
        self.loss_path_ = [loss]
        step = 1.0
        for it in range(self.max_iter):
            self.n_iter_ = it
            if np.max(np.abs(grad)) < self.tol:
                break
            g2 = float(grad @ grad)
            # backtracking line search (Armijo sufficient decrease)
            while True:
                w_new = w - step * grad
                loss_new, grad_new = self._loss_grad(w_new, Xb, y)
                if loss_new <= loss - 1e-4 * step * g2:
                    break
                step *= 0.5
                if step < 1e-16:
                    w_new, loss_new, grad_new = w, loss, grad
                    break
            if loss_new >= loss:
                break  # no usable descent direction left
            w, loss, grad = w_new, loss_new, grad_new
            self.loss_path_.append(loss)
            step = min(step * 2.0, 1e6)
        self.intercept_ = float(w[0])
        self.coef_ = w[1:].copy()
        return self

    def decision_function(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if self.coef_ is None:
            return np.zeros(X.shape[0])
        return self.intercept_ + X @ self.coef_

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


def loss_and_gradient(X, y, w, l2=1.0):
    """Objective and gradient at weight vector w = [intercept, coef...].

    Exposed for gradient verification against finite differences.
    """
    X = np.asarray(X, dtype=np.float64)
    Xb = np.hstack([np.ones((X.shape[0], 1)), X])
    model = LogisticRegressionClassifier(l2=l2)
    return model._loss_grad(np.asarray(w, dtype=np.float64), Xb, np.asarray(y, dtype=np.float64))
