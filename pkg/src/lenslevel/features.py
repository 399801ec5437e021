"""Per-user feature aggregation and the seven evaluation feature sets.

Photo-level and crowd-level measures are reduced to per-user min/max/avg
triples in two stages: comment features average to their photo first,
then photos aggregate to the user. User-family columns are already
per-user and enter unaggregated.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataset import CommentRecord, PhotoRecord, SnapshotConfig, UserRecord, days_since

logger = logging.getLogger(__name__)

PHOTO_BASES = (
    "days_since_upload",
    "days_since_update",
    "groups_count",
    "nima_technical",
    "nima_aesthetic",
    "kong_score",
)
CROWD_BASES = (
    "comments_count",
    "views",
    "favourites",
    "polarity",
    "subjectivity",
    "difficult_words",
    "reading_time_s",
    "entropy_bits",
    "length_chars",
)
AGGREGATES = ("min", "max", "avg")

USER_FAMILY_COLUMNS = (
    "user_total_photos",
    "user_days_since_join",
    "user_following_count",
    "user_groups_count",
    "user_is_pro",
)

FEATURE_SETS = {
    "crowdsourced": ("crowd",),
    "user": ("user",),
    "photo": ("photo",),
    "crowdsourced+user": ("crowd", "user"),
    "crowdsourced+photo": ("crowd", "photo"),
    "user+photo": ("user", "photo"),
    "all": ("crowd", "user", "photo"),
}

_TEXT_BASES = ("polarity", "subjectivity", "difficult_words", "reading_time_s",
               "entropy_bits", "length_chars")


def family_columns(family: str) -> list[str]:
    if family == "user":
        return list(USER_FAMILY_COLUMNS)
    if family == "photo":
        return [f"photo_{b}_{a}" for b in PHOTO_BASES for a in AGGREGATES]
    if family == "crowd":
        return [f"crowd_{b}_{a}" for b in CROWD_BASES for a in AGGREGATES]
    raise ValueError(f"unknown feature family: {family!r}")


def social_activity_columns() -> list[str]:
    """Comment and favourite count triples (the RQ2 social-activity set)."""
    return [f"crowd_{b}_{a}" for b in ("comments_count", "favourites") for a in AGGREGATES]


def aesthetics_technical_columns() -> list[str]:
    """NIMA technical/aesthetic and Kong score triples."""
    return [
        f"photo_{b}_{a}"
        for b in ("nima_technical", "nima_aesthetic", "kong_score")
        for a in AGGREGATES
    ]


@dataclass
class FeatureMatrix:
    feature_set_id: str
    column_names: list
    user_ids: list
    X: np.ndarray

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_cols(self) -> int:
        return self.X.shape[1]

    def column(self, name: str) -> np.ndarray:
        return self.X[:, self.column_names.index(name)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["user_id"] + list(self.column_names))
            for uid, row in zip(self.user_ids, self.X):
                writer.writerow([uid] + [repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, feature_set_id: str = "") -> "FeatureMatrix":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if not header or header[0] != "user_id":
                raise ValueError(f"{path}: first column must be user_id")
            columns = header[1:]
            user_ids, rows = [], []
            for row in reader:
                user_ids.append(row[0])
                rows.append([float(v) for v in row[1:]])
        X = np.array(rows, dtype=np.float64) if rows else np.empty((0, len(columns)))
        return cls(feature_set_id=feature_set_id, column_names=columns, user_ids=user_ids, X=X)


def photo_feature_vector(photo: PhotoRecord, cfg: SnapshotConfig) -> dict:
    return {
        "days_since_upload": float(days_since(photo.upload_date, cfg)),
        "days_since_update": float(days_since(photo.last_update_date, cfg)),
        "groups_count": float(photo.groups_count),
        "nima_technical": photo.nima_technical,
        "nima_aesthetic": photo.nima_aesthetic,
        "kong_score": photo.kong_score,
    }


def aggregate_users(
    photos: list[PhotoRecord],
    comments: list[CommentRecord],
    feats_by_comment: dict,
    cfg: SnapshotConfig,
) -> dict:
    """Per-user min/max/avg of the photo and crowdsourced bases.

    ``feats_by_comment`` maps comment_id -> CommentFeatures for retained
    comments only; the comment count per photo still comes from the raw
    comment table. Photos whose comments were all dropped contribute 0 to
    the text measures. Returns user_id -> {column: value} with only users
    owning at least one photo.
    """
    comments_by_photo = {}
    for c in comments:
        comments_by_photo.setdefault(c.photo_id, []).append(c)

    per_user_rows = {}
    for photo in photos:
        row = photo_feature_vector(photo, cfg)
        attached = comments_by_photo.get(photo.photo_id, [])
        row["comments_count"] = float(len(attached))
        row["views"] = float(photo.views)
        row["favourites"] = float(photo.favourites)
        retained = [feats_by_comment[c.comment_id] for c in attached
                    if c.comment_id in feats_by_comment]
        for base in _TEXT_BASES:
            if retained:
                row[base] = sum(getattr(f, base) for f in retained) / len(retained)
            else:
                row[base] = 0.0
        per_user_rows.setdefault(photo.user_id, []).append(row)

    aggregates = {}
    for user_id, rows in per_user_rows.items():
        out = {}
        for prefix, bases in (("photo", PHOTO_BASES), ("crowd", CROWD_BASES)):
            for base in bases:
                values = [r[base] for r in rows]
                out[f"{prefix}_{base}_min"] = min(values)
                out[f"{prefix}_{base}_max"] = max(values)
                out[f"{prefix}_{base}_avg"] = sum(values) / len(values)
        aggregates[user_id] = out
    return aggregates


def user_feature_vector(user: UserRecord, cfg: SnapshotConfig) -> dict:
    return {
        "user_total_photos": float(user.total_photos),
        "user_days_since_join": float(days_since(user.join_date, cfg)),
        "user_following_count": float(user.following_count),
        "user_groups_count": float(user.groups_count),
        "user_is_pro": 1.0 if user.is_pro else 0.0,
    }


def assemble(
    feature_set_id: str,
    aggregates: dict,
    users: list[UserRecord],
    cfg: SnapshotConfig,
) -> FeatureMatrix:
    """Build the matrix for one feature set, rows sorted by user_id.

    Users without any photo (hence absent from ``aggregates``) are
    excluded with a logged warning so every cell stays finite.
    """
    if feature_set_id not in FEATURE_SETS:
        raise ValueError(f"unknown feature_set_id: {feature_set_id!r}")
    families = FEATURE_SETS[feature_set_id]
    columns = []
    for fam in families:
        columns.extend(family_columns(fam))

    kept_users = []
    skipped = 0
    for user in sorted(users, key=lambda u: u.user_id):
        if "photo" in families or "crowd" in families:
            if user.user_id not in aggregates:
                skipped += 1
                continue
        kept_users.append(user)
    if skipped:
        logger.warning("assemble(%s): excluded %d user(s) with zero photos",
                       feature_set_id, skipped)

    X = np.empty((len(kept_users), len(columns)), dtype=np.float64)
    for i, user in enumerate(kept_users):
        values = dict(user_feature_vector(user, cfg))
        values.update(aggregates.get(user.user_id, {}))
        for j, col in enumerate(columns):
            X[i, j] = values[col]
    if not np.isfinite(X).all():
        raise ValueError("assembled matrix contains non-finite values")
    return FeatureMatrix(
        feature_set_id=feature_set_id,
        column_names=columns,
        user_ids=[u.user_id for u in kept_users],
        X=X,
    )


def select_columns(matrix: FeatureMatrix, columns: list[str], new_id: str) -> FeatureMatrix:
    """Column-subset view used for the RQ2 comparison sets."""
    idx = [matrix.column_names.index(c) for c in columns]
    return FeatureMatrix(
        feature_set_id=new_id,
        column_names=list(columns),
        user_ids=list(matrix.user_ids),
        X=matrix.X[:, idx].copy(),
    )


def standardize(X: np.ndarray, fit_rows: np.ndarray):
    """Z-score all rows using mean/sd fitted on ``fit_rows`` only.

    Population sd (ddof=0); columns constant on the fit rows map to 0
    everywhere. Returns (Z, means, sds).
    """
    fit_rows = np.asarray(fit_rows)
    if fit_rows.size == 0:
        raise ValueError("fit_rows must be non-empty")
    means = X[fit_rows].mean(axis=0)
    sds = X[fit_rows].std(axis=0)
    safe = np.where(sds == 0.0, 1.0, sds)
    Z = (X - means) / safe
    Z[:, sds == 0.0] = 0.0
    return Z, means, sds
