"""Deterministic stratified k-fold assignment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass
class FoldPlan:
    k: int
    assignments: np.ndarray          # row -> fold index
    class_counts: dict               # class -> per-fold counts

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)


def stratified_kfold(y, k: int, seed: int) -> FoldPlan:
    """Shuffle each class with the seeded generator, then deal round-robin.

    Every class must have at least k members; per-fold class counts then
    differ by at most one across folds.
    """
    y = np.asarray(y)
    if k < 2:
        raise ValueError("k must be at least 2 (k=1 leaves no held-out data)")
    classes = np.unique(y)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & _U64]))
    assignments = np.full(y.shape[0], -1, dtype=np.int64)
    class_counts = {}
    for cls in classes:
        rows = np.flatnonzero(y == cls)
        if rows.shape[0] < k:
            raise ValueError(
                f"class {cls!r} has {rows.shape[0]} member(s), fewer than k={k}"
            )
        rng.shuffle(rows)
        folds = np.arange(rows.shape[0]) % k
        assignments[rows] = folds
        class_counts[cls] = np.bincount(folds, minlength=k).tolist()
    return FoldPlan(k=k, assignments=assignments, class_counts=class_counts)
