"""From-scratch classifiers, cross-validation, and evaluation metrics."""

from .boosting import GradientBoostingClassifier
from .evaluate import EvalReport, ModelSpec, cross_validate, make_model
from .folds import FoldPlan, stratified_kfold
from .forest import RandomForestClassifier
from .logistic import LogisticRegressionClassifier
from .metrics import metric_accuracy, metric_auc, metric_f1
from .naive_bayes import GaussianNBClassifier
from .trees import DecisionTreeClassifier

__all__ = [
    "DecisionTreeClassifier",
    "EvalReport",
    "FoldPlan",
    "GaussianNBClassifier",
    "GradientBoostingClassifier",
    "LogisticRegressionClassifier",
    "ModelSpec",
    "RandomForestClassifier",
    "cross_validate",
    "make_model",
    "metric_accuracy",
    "metric_auc",
    "metric_f1",
    "stratified_kfold",
]
