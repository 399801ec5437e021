"""Correlation, one-way ANOVA, two-group MANOVA, and class characterization.

With exactly two groups the MANOVA reduces to Hotelling's T-squared,
which maps to an exact F statistic (no multivariate approximation
formulas needed); Wilks' lambda is reported alongside. F-distribution
tail probabilities are evaluated through the regularized incomplete beta
function.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

logger = logging.getLogger(__name__)

ALPHA = 0.05


@dataclass
class TestResult:
    statistic: float          # F value
    p_value: float
    df: tuple                 # (df_between, df_within)
    significant: bool
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "F": self.statistic,
            "p_value": self.p_value,
            "df": list(self.df),
            "significant": self.significant,
        }
        out.update(self.extras)
        return out


@dataclass
class CorrelationMatrix:
    column_names: list
    r: np.ndarray

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow([""] + list(self.column_names))
            for name, row in zip(self.column_names, self.r):
                writer.writerow([name] + [repr(float(v)) for v in row])


def f_sf(f_value: float, df1: int, df2: int) -> float:
    """Survival function of the F distribution via the regularized
    incomplete beta function."""
    if not np.isfinite(f_value):
        return 0.0
    if f_value <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f_value)
    return float(betainc(df2 / 2.0, df1 / 2.0, x))


def pearson_matrix(X: np.ndarray, column_names) -> CorrelationMatrix:
    """Pairwise Pearson correlations; constant columns correlate 0 with
    everything (logged) and keep a diagonal of 1."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 2:
        raise ValueError("correlation needs at least two rows")
    centered = X - X.mean(axis=0)
    sd = X.std(axis=0)
    constant = np.flatnonzero(sd == 0.0)
    for j in constant:
        logger.warning("constant column %r: correlations set to 0", column_names[j])
    cov = centered.T @ centered / X.shape[0]
    denom = np.outer(sd, sd)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(denom > 0.0, cov / np.where(denom > 0.0, denom, 1.0), 0.0)
    r = np.clip((r + r.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(r, 1.0)
    return CorrelationMatrix(column_names=list(column_names), r=r)


def anova_oneway(values, group_labels) -> TestResult:
    """One-way fixed-effects F test on group means."""
    values = np.asarray(values, dtype=np.float64)
    group_labels = np.asarray(group_labels)
    groups = [values[group_labels == g] for g in np.unique(group_labels)]
    if len(groups) < 2:
        raise ValueError("ANOVA needs at least two groups")
    for g in groups:
        if g.shape[0] < 2:
            raise ValueError("every group needs at least two members")
    grand = values.mean()
    ssb = sum(g.shape[0] * (g.mean() - grand) ** 2 for g in groups)
    ssw = sum(float(np.sum((g - g.mean()) ** 2)) for g in groups)
    df_b = len(groups) - 1
    df_w = values.shape[0] - len(groups)
    if ssw == 0.0:
        if ssb == 0.0:
            return TestResult(0.0, 1.0, (df_b, df_w), False)
        return TestResult(float("inf"), 0.0, (df_b, df_w), True)
    f_value = (ssb / df_b) / (ssw / df_w)
    p = f_sf(f_value, df_b, df_w)
    return TestResult(float(f_value), p, (df_b, df_w), p < ALPHA)


def manova_two_group(X: np.ndarray, group_labels) -> TestResult:
    """Two-group MANOVA as Hotelling's T-squared with an exact F mapping.

    The pooled covariance gets a ridge of 1e-8 * trace/p only when plain
    Cholesky fails, so well-conditioned problems stay exact.
    """
    X = np.asarray(X, dtype=np.float64)
    group_labels = np.asarray(group_labels)
    keys = np.unique(group_labels)
    if keys.shape[0] != 2:
        raise ValueError("two-group MANOVA needs exactly two groups")
    X1, X2 = X[group_labels == keys[0]], X[group_labels == keys[1]]
    n1, n2 = X1.shape[0], X2.shape[0]
    p = X.shape[1]
    if n1 < 2 or n2 < 2:
        raise ValueError("every group needs at least two members")
    if n1 + n2 - 2 <= p:
        raise ValueError(
            f"too few samples ({n1 + n2}) for {p} features; need n1+n2-2 > p"
        )
    d = X1.mean(axis=0) - X2.mean(axis=0)
    pooled = ((n1 - 1) * np.cov(X1, rowvar=False, ddof=1)
              + (n2 - 1) * np.cov(X2, rowvar=False, ddof=1)) / (n1 + n2 - 2)
    pooled = np.atleast_2d(pooled)
    if np.all(d == 0.0):
        t2 = 0.0  # identical mean vectors; no need to touch the covariance
    else:
        try:
            np.linalg.cholesky(pooled)  # singularity probe; solve alone won't flag PSD rank loss
            solved = np.linalg.solve(pooled, d)
        except np.linalg.LinAlgError:
            ridge = 1e-8 * np.trace(pooled) / p
            logger.warning("singular pooled covariance; adding ridge %.3e", ridge)
            try:
                regularized = pooled + ridge * np.eye(p)
                np.linalg.cholesky(regularized)
                solved = np.linalg.solve(regularized, d)
            except np.linalg.LinAlgError as exc:
                raise ValueError("pooled covariance singular even after ridge") from exc
        t2 = float(n1 * n2 / (n1 + n2) * d @ solved)
    df1, df2 = p, n1 + n2 - p - 1
    f_value = (n1 + n2 - p - 1) / (p * (n1 + n2 - 2)) * t2
    wilks = 1.0 / (1.0 + t2 / (n1 + n2 - 2))
    p_value = f_sf(f_value, df1, df2)
    return TestResult(
        float(f_value), p_value, (df1, df2), p_value < ALPHA,
        extras={"hotelling_t2": t2, "wilks_lambda": wilks,
                "group_sizes": [int(n1), int(n2)]},
    )


@dataclass
class CharacterizationReport:
    column_names: list
    class_sizes: dict                 # {"professional": n1, "non_professional": n2}
    means: dict                       # class -> [per-feature mean]
    anova: list                       # per-feature TestResult
    manova: TestResult

    @property
    def significant_features(self) -> list:
        return [name for name, test in zip(self.column_names, self.anova)
                if test.significant]

    def to_dict(self) -> dict:
        return {
            "class_sizes": self.class_sizes,
            "manova": self.manova.to_dict(),
            "features": [
                {
                    "name": name,
                    "mean_professional": self.means["professional"][i],
                    "mean_non_professional": self.means["non_professional"][i],
                    "anova": self.anova[i].to_dict(),
                }
                for i, name in enumerate(self.column_names)
            ],
            "significant_features": self.significant_features,
        }

    def to_markdown(self) -> str:
        lines = [
            "# Professional vs non-professional characterization",
            "",
            f"Predicted professionals: {self.class_sizes['professional']}, "
            f"non-professionals: {self.class_sizes['non_professional']}.",
            "",
            f"MANOVA: F = {self.manova.statistic:.4g}, "
            f"p = {self.manova.p_value:.4g}, df = {self.manova.df}, "
            f"Wilks lambda = {self.manova.extras['wilks_lambda']:.4g} "
            f"({'significant' if self.manova.significant else 'not significant'} "
            f"at alpha = {ALPHA}).",
            "",
            "| feature | professional | non-professional | F | p | significant |",
            "|---|---|---|---|---|---|",
        ]
        for i, name in enumerate(self.column_names):
            test = self.anova[i]
            mark = "yes" if test.significant else ""
            lines.append(
                f"| {name} | {self.means['professional'][i]:.4g} "
                f"| {self.means['non_professional'][i]:.4g} "
                f"| {test.statistic:.4g} | {test.p_value:.4g} | {mark} |"
            )
        lines.append("")
        return "\n".join(lines)


def characterize(predictions, matrix) -> CharacterizationReport:
    """Per-class feature means with ANOVA flags and the global MANOVA.

    ``predictions`` are the classes under study (normally a model's
    out-of-fold predictions, optionally ground truth for sensitivity
    checks), given as user_id -> bool or an array aligned with the matrix.
    """
    if isinstance(predictions, np.ndarray):
        pred = predictions.astype(bool)
    else:
        mapping = predictions.labels if hasattr(predictions, "labels") else predictions
        missing = [u for u in matrix.user_ids if u not in mapping]
        if missing:
            raise ValueError(f"predictions missing for {len(missing)} user(s)")
        pred = np.array([bool(mapping[u]) for u in matrix.user_ids])
    if pred.shape[0] != matrix.n_rows:
        raise ValueError("predictions do not align with matrix rows")
    n_pro = int(pred.sum())
    n_non = int((~pred).sum())
    if n_pro == 0 or n_non == 0:
        raise ValueError("one predicted class is empty; nothing to characterize")

    labels01 = pred.astype(np.int64)
    means = {
        "professional": [float(v) for v in matrix.X[pred].mean(axis=0)],
        "non_professional": [float(v) for v in matrix.X[~pred].mean(axis=0)],
    }
    anova = [anova_oneway(matrix.X[:, j], labels01) for j in range(matrix.n_cols)]
    manova = manova_two_group(matrix.X, labels01)
    return CharacterizationReport(
        column_names=list(matrix.column_names),
        class_sizes={"professional": n_pro, "non_professional": n_non},
        means=means,
        anova=anova,
        manova=manova,
    )
