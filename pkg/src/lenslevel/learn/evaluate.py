"""Cross-validated evaluation of one model on one feature matrix."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..features import FeatureMatrix, standardize
from .boosting import GradientBoostingClassifier
from .folds import stratified_kfold
from .forest import RandomForestClassifier
from .logistic import LogisticRegressionClassifier
from .metrics import metric_accuracy, metric_auc, metric_f1
from .naive_bayes import GaussianNBClassifier

_U64 = 0xFFFFFFFFFFFFFFFF

MODEL_KINDS = (
    "gaussian_nb",
    "logistic_regression",
    "random_forest",
    "gradient_boosting",
)


@dataclass(frozen=True)
class ModelSpec:
    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind: {self.kind!r}")


def make_model(spec: ModelSpec, seed=None):
    """Instantiate the classifier for a spec; ``seed`` overrides spec.seed."""
    seed = spec.seed if seed is None else seed
    p = spec.params
    if spec.kind == "gaussian_nb":
        return GaussianNBClassifier(var_floor=p.get("var_floor", 1e-9))
    if spec.kind == "logistic_regression":
        return LogisticRegressionClassifier(
            l2=p.get("l2", 1.0), tol=p.get("tol", 1e-6),
            max_iter=p.get("max_iter", 1000),
        )
    if spec.kind == "random_forest":
        return RandomForestClassifier(
            n_trees=p.get("n_trees", 100),
            max_features=p.get("max_features", "sqrt"),
            bootstrap=p.get("bootstrap", True),
            max_depth=p.get("max_depth", None),
            min_samples_split=p.get("min_samples_split", 2),
            seed=seed,
        )
    return GradientBoostingClassifier(
        n_stages=p.get("n_stages", 100),
        max_depth=p.get("max_depth", 3),
        learning_rate=p.get("learning_rate", 0.1),
        min_samples_split=p.get("min_samples_split", 2),
        seed=seed,
    )


@dataclass
class EvalReport:
    model_kind: str
    feature_set_id: str
    accuracy: float
    auc: float
    f1: float
    fold_accuracy: list
    fold_auc: list
    fold_f1: list
    k: int
    seed: int
    oof_scores: np.ndarray = None  # out-of-fold score per row, matrix order

    def to_dict(self) -> dict:
        return {
            "model": self.model_kind,
            "feature_set": self.feature_set_id,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "f1": self.f1,
            "folds": {
                "accuracy": self.fold_accuracy,
                "auc": self.fold_auc,
                "f1": self.fold_f1,
            },
            "k": self.k,
            "seed": self.seed,
        }


def labels_to_array(labels, user_ids) -> np.ndarray:
    """Align a user_id -> bool mapping (or LabelVector) with matrix rows."""
    if isinstance(labels, np.ndarray):
        return labels.astype(np.int64)
    mapping = labels.labels if hasattr(labels, "labels") else labels
    missing = [u for u in user_ids if u not in mapping]
    if missing:
        raise ValueError(f"labels missing for {len(missing)} user(s), e.g. {missing[:3]}")
    return np.array([1 if mapping[u] else 0 for u in user_ids], dtype=np.int64)


def _fold_seed(seed: int, fold: int) -> int:
    return int(np.random.SeedSequence([int(seed) & _U64, fold]).generate_state(1)[0])


def cross_validate(spec: ModelSpec, matrix: FeatureMatrix, labels, k: int = 10,
                   seed: int = 0) -> EvalReport:
    """Stratified k-fold evaluation; metrics are unweighted fold means.

    Logistic regression gets per-fold standardization fitted on the
    training rows only. Out-of-fold scores for every row are retained on
    the report for downstream characterization.
    """
    y = labels_to_array(labels, matrix.user_ids)
    if y.shape[0] != matrix.n_rows:
        raise ValueError("labels do not align with matrix rows")
    plan = stratified_kfold(y, k, seed)
    oof = np.full(matrix.n_rows, np.nan)
    accs, aucs, f1s = [], [], []
    for fold in range(k):
        train = plan.train_rows(fold)
        test = plan.test_rows(fold)
        if spec.kind == "logistic_regression":
            Z, _, _ = standardize(matrix.X, train)
            X_train, X_test = Z[train], Z[test]
        else:
            X_train, X_test = matrix.X[train], matrix.X[test]
        model = make_model(spec, seed=_fold_seed(seed, fold))
        model.fit(X_train, y[train])
        scores = model.predict_proba(X_test)
        oof[test] = scores
        accs.append(metric_accuracy(y[test], scores))
        aucs.append(metric_auc(scores, y[test]))
        f1s.append(metric_f1(y[test], scores))
    return EvalReport(
        model_kind=spec.kind,
        feature_set_id=matrix.feature_set_id,
        accuracy=float(np.mean(accs)),
        auc=float(np.mean(aucs)),
        f1=float(np.mean(f1s)),
        fold_accuracy=accs,
        fold_auc=aucs,
        fold_f1=f1s,
        k=k,
        seed=seed,
        oof_scores=oof,
    )
