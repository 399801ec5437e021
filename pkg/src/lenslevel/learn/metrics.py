"""Binary classification metrics: accuracy, F1, and rank-based AUC."""

from __future__ import annotations

import numpy as np


def metric_accuracy(y_true, scores, threshold: float = 0.5) -> float:
    y_true = np.asarray(y_true)
    pred = np.asarray(scores) >= threshold
    return float(np.mean(pred == (y_true == 1)))


def metric_f1(y_true, scores, threshold: float = 0.5) -> float:
    """F1 of the positive class; 0.0 when no positives are predicted or present."""
    y_true = np.asarray(y_true) == 1
    pred = np.asarray(scores) >= threshold
    tp = int(np.sum(pred & y_true))
    fp = int(np.sum(pred & ~y_true))
    fn = int(np.sum(~pred & y_true))
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


def metric_auc(scores, y_true) -> float:
    """Mann-Whitney AUC: P(score_pos > score_neg) with ties counted half.

    Counted over score groups with integer arithmetic, so the result is
    bit-identical to explicit pair enumeration.
    """
    scores = np.asarray(scores, dtype=np.float64)
    y_true = np.asarray(y_true) == 1
    n_pos = int(y_true.sum())
    n_neg = y_true.shape[0] - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUC needs at least one positive and one negative label")
    order = np.argsort(scores, kind="mergesort")
    concordant = 0
    tied = 0
    neg_below = 0
    i = 0
    n = scores.shape[0]
    while i < n:
        j = i
        group_pos = 0
        group_neg = 0
        while j < n and scores[order[j]] == scores[order[i]]:
            if y_true[order[j]]:
                group_pos += 1
            else:
                group_neg += 1
            j += 1
        concordant += group_pos * neg_below
        tied += group_pos * group_neg
        neg_below += group_neg
        i = j
    return (concordant + 0.5 * tied) / (n_pos * n_neg)
