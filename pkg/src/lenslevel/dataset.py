"""Ingestion and filtering of the raw user/photo/comment tables.

Files are the ingestion boundary: JSON-lines or CSV with fixed headers
(see the schemas below). Rows that violate a per-row invariant are
rejected with a logged reason instead of aborting the run; duplicated
primary keys and missing columns are fatal.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

logger = logging.getLogger(__name__)

USER_COLUMNS = [
    "user_id",
    "occupation",
    "total_photos",
    "join_date",
    "following_count",
    "groups_count",
    "is_pro",
    "photos_in_window",
]
PHOTO_COLUMNS = [
    "photo_id",
    "user_id",
    "upload_date",
    "last_update_date",
    "groups_count",
    "views",
    "favourites",
    "nima_technical",
    "nima_aesthetic",
    "kong_score",
]
COMMENT_COLUMNS = ["comment_id", "photo_id", "raw_text"]


@dataclass(frozen=True)
class UserRecord:
    user_id: str
    occupation: str
    total_photos: int
    join_date: date
    following_count: int
    groups_count: int
    is_pro: bool
    photos_in_window: int


@dataclass(frozen=True)
class PhotoRecord:
    photo_id: str
    user_id: str
    upload_date: date
    last_update_date: date
    groups_count: int
    views: int
    favourites: int
    nima_technical: float
    nima_aesthetic: float
    kong_score: float


@dataclass(frozen=True)
class CommentRecord:
    comment_id: str
    photo_id: str
    raw_text: str


@dataclass(frozen=True)
class SnapshotConfig:
    """Collection-window parameters shared by filtering and date features."""

    reference_date: date = date(2021, 12, 31)
    window_month: str = "2021-12"
    activity_ratio_cutoff: float = 0.20
    trim_fraction: float = 0.05

    def __post_init__(self):
        if not (0.0 < self.trim_fraction < 0.5):
            raise ValueError(f"trim_fraction must be in (0, 0.5), got {self.trim_fraction}")
        if not (0.0 < self.activity_ratio_cutoff <= 1.0):
            raise ValueError(
                f"activity_ratio_cutoff must be in (0, 1], got {self.activity_ratio_cutoff}"
            )


@dataclass
class LoadResult:
    """Parsed rows of one table plus the per-row reject log."""

    rows: list
    rejects: list = field(default_factory=list)  # (row_number, reason)


class SchemaError(ValueError):
    """Missing columns, duplicated keys, or an unparseable file."""


def _parse_date(value) -> date:
    return date.fromisoformat(str(value).strip())


def _parse_count(value, name: str) -> int:
    n = int(value)
    if n < 0:
        raise ValueError(f"negative count: {name}")
    return n


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "1"):
        return True
    if text in ("false", "0"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _parse_user(raw: dict) -> UserRecord:
    rec = UserRecord(
        user_id=str(raw["user_id"]),
        occupation=str(raw["occupation"]) if raw["occupation"] is not None else "",
        total_photos=_parse_count(raw["total_photos"], "total_photos"),
        join_date=_parse_date(raw["join_date"]),
        following_count=_parse_count(raw["following_count"], "following_count"),
        groups_count=_parse_count(raw["groups_count"], "groups_count"),
        is_pro=_parse_bool(raw["is_pro"]),
        photos_in_window=_parse_count(raw["photos_in_window"], "photos_in_window"),
    )
    if rec.total_photos < rec.photos_in_window:
        raise ValueError("photos_in_window exceeds total_photos")
    if not rec.user_id:
        raise ValueError("empty user_id")
    return rec


def _parse_photo(raw: dict) -> PhotoRecord:
    rec = PhotoRecord(
        photo_id=str(raw["photo_id"]),
        user_id=str(raw["user_id"]),
        upload_date=_parse_date(raw["upload_date"]),
        last_update_date=_parse_date(raw["last_update_date"]),
        groups_count=_parse_count(raw["groups_count"], "groups_count"),
        views=_parse_count(raw["views"], "views"),
        favourites=_parse_count(raw["favourites"], "favourites"),
        nima_technical=float(raw["nima_technical"]),
        nima_aesthetic=float(raw["nima_aesthetic"]),
        kong_score=float(raw["kong_score"]),
    )
    if rec.last_update_date < rec.upload_date:
        raise ValueError("last_update_date before upload_date")
    for name in ("nima_technical", "nima_aesthetic"):
        score = getattr(rec, name)
        if not (1.0 <= score <= 10.0):
            raise ValueError(f"{name} outside [1, 10]")
    if not (0.0 <= rec.kong_score <= 1.0):
        raise ValueError("kong_score outside [0, 1]")
    if not rec.photo_id:
        raise ValueError("empty photo_id")
    return rec


def _parse_comment(raw: dict) -> CommentRecord:
    rec = CommentRecord(
        comment_id=str(raw["comment_id"]),
        photo_id=str(raw["photo_id"]),
        raw_text=str(raw["raw_text"]) if raw["raw_text"] is not None else "",
    )
    if not rec.comment_id:
        raise ValueError("empty comment_id")
    if not rec.photo_id:
        raise ValueError("empty photo_id")
    return rec


_KINDS = {
    "users": (USER_COLUMNS, _parse_user, "user_id"),
    "photos": (PHOTO_COLUMNS, _parse_photo, "photo_id"),
    "comments": (COMMENT_COLUMNS, _parse_comment, "comment_id"),
}


def _iter_raw_rows(path: Path):
    """Yield (row_number, dict) from a .jsonl or .csv file."""
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None:
                raise SchemaError(f"{path}: empty CSV, no header")
            for i, row in enumerate(reader, start=1):
                yield i, row
    else:
        with open(path, encoding="utf-8") as fh:
            for i, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    yield i, json.loads(line)
                except json.JSONDecodeError as exc:
                    yield i, exc


def load_table(path, kind: str) -> LoadResult:
    """Load one typed table, returning parsed rows and a reject log.

    Per-row invariant violations (negative counts, out-of-range scores,
    inverted dates) land in ``rejects`` as ``(row_number, reason)``.
    A missing column or a duplicated primary key raises SchemaError.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown table kind: {kind!r}")
    columns, parse, key_field = _KINDS[kind]
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"cannot read table file: {path}")

    result = LoadResult(rows=[])
    seen_keys = set()
    for row_no, raw in _iter_raw_rows(path):
        if isinstance(raw, Exception):
            result.rejects.append((row_no, f"invalid JSON: {raw}"))
            continue
        missing = [c for c in columns if c not in raw]
        if missing:
            raise SchemaError(f"{path}: row {row_no} missing required column(s) {missing}")
        try:
            rec = parse(raw)
        except (ValueError, TypeError) as exc:
            result.rejects.append((row_no, str(exc)))
            continue
        key = getattr(rec, key_field)
        if key in seen_keys:
            raise SchemaError(f"{path}: duplicate {key_field}: {key!r}")
        seen_keys.add(key)
        result.rows.append(rec)
    if result.rejects:
        logger.warning("%s: rejected %d row(s) of %s", path, len(result.rejects), kind)
    result.rows.sort(key=lambda r: getattr(r, key_field))
    return result


def save_table(rows, path) -> None:
    """Write records as JSON-lines sorted by primary key (round-trip stable)."""
    path = Path(path)
    if not rows:
        path.write_text("", encoding="utf-8")
        return
    key_field = {"UserRecord": "user_id", "PhotoRecord": "photo_id", "CommentRecord": "comment_id"}[
        type(rows[0]).__name__
    ]
    with open(path, "w", encoding="utf-8") as fh:
        for rec in sorted(rows, key=lambda r: getattr(r, key_field)):
            raw = {}
            for name, value in vars(rec).items():
                raw[name] = value.isoformat() if isinstance(value, date) else value
            fh.write(json.dumps(raw, ensure_ascii=False, sort_keys=True) + "\n")


def filter_min_activity(users: list[UserRecord], cfg: SnapshotConfig) -> list[UserRecord]:
    """Keep users whose collection-window share of activity is below the cutoff.

    Users at or above the cutoff (and users with zero total photos) are
    removed: uploading most of your photos in one month signals a fresh or
    dormant account rather than sustained activity.
    """
    kept = []
    for u in users:
        if u.total_photos == 0:
            continue
        if u.photos_in_window / u.total_photos < cfg.activity_ratio_cutoff:
            kept.append(u)
    return kept


def trim_outliers(users: list[UserRecord], cfg: SnapshotConfig) -> list[UserRecord]:
    """Drop the lowest and highest trim_fraction of users by total_photos.

    Ties are broken by user_id ascending so the cut is deterministic.
    Output is sorted by user_id; size is n - 2*floor(trim_fraction*n).
    """
    n = len(users)
    k = int(cfg.trim_fraction * n)
    ranked = sorted(users, key=lambda u: (u.total_photos, u.user_id))
    kept = ranked[k : n - k] if k else list(ranked)
    kept.sort(key=lambda u: u.user_id)
    return kept


def days_since(d: date, cfg: SnapshotConfig) -> int:
    """Whole days between d and the snapshot reference date."""
    delta = (cfg.reference_date - d).days
    if delta < 0:
        raise ValueError(f"date {d.isoformat()} is after reference {cfg.reference_date.isoformat()}")
    return delta


def validate_references(
    users: list[UserRecord],
    photos: list[PhotoRecord],
    comments: list[CommentRecord],
) -> tuple[list[PhotoRecord], list[CommentRecord], list]:
    """Drop photos/comments whose foreign key resolves nowhere, with reasons."""
    rejects = []
    user_ids = {u.user_id for u in users}
    photos_ok = []
    for p in photos:
        if p.user_id in user_ids:
            photos_ok.append(p)
        else:
            rejects.append(("photos", p.photo_id, f"unknown user_id: {p.user_id}"))
    photo_ids = {p.photo_id for p in photos_ok}
    comments_ok = []
    for c in comments:
        if c.photo_id in photo_ids:
            comments_ok.append(c)
        else:
            rejects.append(("comments", c.comment_id, f"unknown photo_id: {c.photo_id}"))
    if rejects:
        logger.warning("referential validation dropped %d row(s)", len(rejects))
    return photos_ok, comments_ok, rejects


def apply_snapshot_filters(
    users: list[UserRecord],
    photos: list[PhotoRecord],
    comments: list[CommentRecord],
    cfg: SnapshotConfig,
) -> tuple[list[UserRecord], list[PhotoRecord], list[CommentRecord]]:
    """Run the activity filter and outlier trim, then cascade referential integrity.

    Photos of removed users and comments of removed photos are dropped, so
    every retained photo/comment resolves against a retained parent.
    """
    kept_users = trim_outliers(filter_min_activity(users, cfg), cfg)
    user_ids = {u.user_id for u in kept_users}
    kept_photos = sorted(
        (p for p in photos if p.user_id in user_ids), key=lambda p: p.photo_id
    )
    photo_ids = {p.photo_id for p in kept_photos}
    kept_comments = sorted(
        (c for c in comments if c.photo_id in photo_ids), key=lambda c: c.comment_id
    )
    return kept_users, kept_photos, kept_comments
