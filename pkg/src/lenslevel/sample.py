"""Deterministic synthetic fixture: a small Flickr-like snapshot.

Ships with the repo so tests and CI never need the released dataset.
Professional-occupation users get mildly better quality scores and more
social activity, so the classifiers have real signal to find.
"""

from __future__ import annotations

import json
from datetime import date, timedelta
from pathlib import Path

import numpy as np

PRO_OCCUPATIONS = [
    "Photographer",
    "freelance photographer",
    "wedding photographer",
    "photojournalist",
    "landscape photography",
    "fotógrafo",
    "fotógrafa profesional",
    "Fotograf",
    "fotografia e viaggi",
    "valokuvaaja",
    "ljósmyndari",
    "Bildhauer",  # sculptor; deliberate substring false positive kept for the audit trail
]

NON_PRO_OCCUPATIONS = [
    "software engineer",
    "teacher",
    "nurse",
    "student",
    "architect",
    "graphic designer",
    "musician",
    "accountant",
    "chef",
    "writer",
    "retired",
    "marketing manager",
    "data analyst",
    "carpenter",
    "biologist",
    "",
    "",
]

COMMENT_POOL = [
    "Great shot!",
    "Stunning colors \U0001F60D",
    "Wonderful composition, love the light",
    "❤️❤️",
    "Nice!",
    "wow",
    "Superb detail and clarity",
    "beautiful capture \U0001F4F7",
    "A masterpiece",
    "love the mood here",
    "Amazing work as always",
    "so nice",
    "Magnifique",
    "precioso",
    "Einfach wunderbar",
    "Congrats on explore, well deserved",
    "Fantastic light and atmosphere",
    "this is so",
    "the a of",
    "!!!",
    "Check my gallery www.example.com/gallery",
    "More photos at https://example.com/u/42",
    "too dark for me, sorry",
    "Terrible crop",
    "a bit blurry but the moment is great",
    "Perfect timing \U0001F525",
    "Incredible depth of field",
    "gorgeous tones",
    "Excellent use of negative space",
    "breathtaking view \U0001F304",
]


def _iso(d: date) -> str:
    return d.isoformat()


def generate_sample(out_dir, n_users: int = 200, seed: int = 20211231) -> dict:
    """Write users/photos/comments JSONL plus a pipeline config; returns paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    reference = date(2021, 12, 31)

    users = []
    photos = []
    comments = []
    photo_serial = 0
    comment_serial = 0

    for i in range(n_users):
        user_id = f"u{i:04d}"
        is_pro_photo = rng.random() < 0.16
        if is_pro_photo:
            occupation = PRO_OCCUPATIONS[rng.integers(0, len(PRO_OCCUPATIONS))]
        else:
            occupation = NON_PRO_OCCUPATIONS[rng.integers(0, len(NON_PRO_OCCUPATIONS))]

        total_photos = int(np.exp(rng.uniform(np.log(20), np.log(5000))))
        # most users stay under the 20% activity cutoff; a few trip it
        ratio = rng.uniform(0.0, 0.19) if rng.random() < 0.92 else rng.uniform(0.2, 0.6)
        photos_in_window = min(total_photos, max(0, int(total_photos * ratio)))
        join_date = reference - timedelta(days=int(rng.integers(200, 6200)))
        following = int(rng.lognormal(7.0 if is_pro_photo else 6.9, 0.6))
        groups = int(rng.poisson(18 if is_pro_photo else 12))
        users.append({
            "user_id": user_id,
            "occupation": occupation,
            "total_photos": total_photos,
            "join_date": _iso(join_date),
            "following_count": following,
            "groups_count": groups,
            "is_pro": bool(rng.random() < (0.45 if is_pro_photo else 0.25)),
            "photos_in_window": photos_in_window,
        })

        for _ in range(int(rng.integers(3, 13))):
            photo_id = f"p{photo_serial:06d}"
            photo_serial += 1
            upload = reference - timedelta(days=int(rng.integers(0, 3600)))
            update = min(upload + timedelta(days=int(rng.integers(0, 200))), reference)
            nima_t = float(np.clip(rng.normal(5.2 if is_pro_photo else 4.7, 0.7), 1, 10))
            nima_a = float(np.clip(rng.normal(4.9 if is_pro_photo else 4.5, 0.7), 1, 10))
            kong = float(np.clip(rng.normal(0.55 if is_pro_photo else 0.50, 0.10), 0, 1))
            views = int(rng.lognormal(7.0 if is_pro_photo else 5.2, 1.0))
            favourites = int(views * rng.uniform(0.005, 0.05))
            photos.append({
                "photo_id": photo_id,
                "user_id": user_id,
                "upload_date": _iso(upload),
                "last_update_date": _iso(update),
                "groups_count": int(rng.poisson(12 if is_pro_photo else 4)),
                "views": views,
                "favourites": favourites,
                "nima_technical": round(nima_t, 4),
                "nima_aesthetic": round(nima_a, 4),
                "kong_score": round(kong, 4),
            })
            n_comments = int(rng.poisson(1.6 if is_pro_photo else 1.1))
            for _ in range(min(n_comments, 6)):
                comments.append({
                    "comment_id": f"c{comment_serial:07d}",
                    "photo_id": photo_id,
                    "raw_text": COMMENT_POOL[rng.integers(0, len(COMMENT_POOL))],
                })
                comment_serial += 1

    paths = {}
    for name, rows in (("users", users), ("photos", photos), ("comments", comments)):
        path = out_dir / f"{name}.jsonl"
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
        paths[name] = str(path)

    config = {
        "users": "users.jsonl",
        "photos": "photos.jsonl",
        "comments": "comments.jsonl",
        "reference_date": "2021-12-31",
        "window_month": "2021-12",
        "activity_ratio_cutoff": 0.20,
        "trim_fraction": 0.05,
        "seed": 7,
        "k": 10,
        "models": ["gaussian_nb", "logistic_regression", "random_forest", "gradient_boosting"],
        "feature_sets": ["crowdsourced", "user", "photo", "crowdsourced+user",
                         "crowdsourced+photo", "user+photo", "all"],
    }
    config_path = out_dir / "lenslevel.json"
    config_path.write_text(json.dumps(config, indent=2, sort_keys=True) + "\n",
                           encoding="utf-8")
    paths["config"] = str(config_path)
    return paths
