"""Pipeline steps, artifact schemas, and the content-hash run manifest.

Every step reads files and writes files under the run directory; a step
is skipped when its recorded input digests match and its outputs are
still on disk unchanged. Manifests carry no wall-clock data or absolute
paths, so runs with equal inputs produce byte-identical manifests (step
timing goes to the stderr log instead).
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    SnapshotConfig,
    apply_snapshot_filters,
    load_table,
    save_table,
    validate_references,
)
from .features import (
    FEATURE_SETS,
    FeatureMatrix,
    aesthetics_technical_columns,
    aggregate_users,
    assemble,
    select_columns,
    social_activity_columns,
)
from .labeler import label_users
from .learn import ModelSpec, cross_validate
from .stats import characterize, pearson_matrix
from .textfeat import (
    READING_SECONDS_PER_CHAR,
    CommentFeatures,
    compute_features,
    load_easy_words,
    load_sentiment_lexicon,
)
from .textprep import CleanComment, load_emoji_map, load_stopwords, normalize_comment

logger = logging.getLogger(__name__)

DEFAULT_MODELS = ("gaussian_nb", "logistic_regression", "random_forest",
                  "gradient_boosting")
DATA_FILE_KEYS = ("stopwords", "emoji_names", "sentiment_lexicon", "easy_words")

RQ2_SETS = {
    "aesthetics_technical": aesthetics_technical_columns,
    "social_activity": social_activity_columns,
}


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    users: Path
    photos: Path
    comments: Path
    out_dir: Path
    snapshot: SnapshotConfig = field(default_factory=SnapshotConfig)
    seed: int = 0
    k: int = 10
    models: list = field(default_factory=lambda: [ModelSpec(kind=k) for k in DEFAULT_MODELS])
    feature_sets: list = field(default_factory=lambda: list(FEATURE_SETS))
    data_files: dict = field(default_factory=dict)  # overrides for bundled data
    reading_seconds_per_char: float = READING_SECONDS_PER_CHAR

    @classmethod
    def from_file(cls, path, out_dir=None) -> "PipelineConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        base = path.parent

        def resolve(p):
            p = Path(p)
            return p if p.is_absolute() else base / p

        try:
            snapshot = SnapshotConfig(
                reference_date=date.fromisoformat(raw.get("reference_date", "2021-12-31")),
                window_month=raw.get("window_month", "2021-12"),
                activity_ratio_cutoff=raw.get("activity_ratio_cutoff", 0.20),
                trim_fraction=raw.get("trim_fraction", 0.05),
            )
            models = [_parse_model_entry(m) for m in raw.get("models", list(DEFAULT_MODELS))]
            feature_sets = raw.get("feature_sets", list(FEATURE_SETS))
            for fs in feature_sets:
                if fs not in FEATURE_SETS:
                    raise ConfigError(f"unknown feature set in config: {fs!r}")
            cfg = cls(
                users=resolve(raw["users"]),
                photos=resolve(raw["photos"]),
                comments=resolve(raw["comments"]),
                out_dir=Path(out_dir) if out_dir else resolve(raw.get("out", "run")),
                snapshot=snapshot,
                seed=int(raw.get("seed", 0)),
                k=int(raw.get("k", 10)),
                models=models,
                feature_sets=feature_sets,
                data_files={k: resolve(v) for k, v in raw.get("data_files", {}).items()},
                reading_seconds_per_char=float(
                    raw.get("reading_seconds_per_char", READING_SECONDS_PER_CHAR)
                ),
            )
        except KeyError as exc:
            raise ConfigError(f"config {path} missing required key: {exc}") from exc
        for key in cfg.data_files:
            if key not in DATA_FILE_KEYS:
                raise ConfigError(f"unknown data_files override: {key!r}")
        return cfg

    def validate_inputs(self):
        for role in ("users", "photos", "comments"):
            p = getattr(self, role)
            if not Path(p).is_file():
                raise ConfigError(f"{role} file does not exist: {p}")
        for key, p in self.data_files.items():
            if not Path(p).is_file():
                raise ConfigError(f"data file override {key} does not exist: {p}")

    def settings_dict(self) -> dict:
        """Location-independent settings (hashed into the manifest)."""
        return {
            "reference_date": self.snapshot.reference_date.isoformat(),
            "window_month": self.snapshot.window_month,
            "activity_ratio_cutoff": self.snapshot.activity_ratio_cutoff,
            "trim_fraction": self.snapshot.trim_fraction,
            "seed": self.seed,
            "k": self.k,
            "models": [{"kind": m.kind, "params": m.params} for m in self.models],
            "feature_sets": list(self.feature_sets),
            "reading_seconds_per_char": self.reading_seconds_per_char,
            "tool_version": __version__,
        }


def _parse_model_entry(entry) -> ModelSpec:
    if isinstance(entry, str):
        return ModelSpec(kind=entry)
    entry = dict(entry)
    kind = entry.pop("kind")
    seed = entry.pop("seed", 0)
    return ModelSpec(kind=kind, seed=seed, params=entry)


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _hash_obj(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()


def _write_json(path, obj) -> None:
    Path(path).write_text(
        json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


def _write_jsonl(path, rows) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")


def _read_jsonl(path) -> list:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


class PipelineRunner:
    """Executes steps with digest-based skip logic and manifest upkeep."""

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.out = Path(config.out_dir)
        self.out.mkdir(parents=True, exist_ok=True)
        config.validate_inputs()
        self.input_digests = {
            "users": sha256_file(config.users),
            "photos": sha256_file(config.photos),
            "comments": sha256_file(config.comments),
        }
        for key in DATA_FILE_KEYS:
            override = config.data_files.get(key)
            self.input_digests[key] = (
                sha256_file(override) if override else _bundled_digest(key)
            )
        self.manifest = {
            "tool_version": __version__,
            "config_hash": _hash_obj(config.settings_dict()),
            "inputs": dict(sorted(self.input_digests.items())),
            "steps": {},
        }
        self.previous = self._load_previous()

    def _load_previous(self):
        path = self.out / "manifest.json"
        if not path.is_file():
            return {}
        try:
            return json.loads(path.read_text(encoding="utf-8")).get("steps", {})
        except (json.JSONDecodeError, OSError):
            return {}

    def artifact(self, name: str) -> Path:
        return self.out / name

    def run_step(self, name: str, inputs_hash: str, fn) -> dict:
        """Run fn() -> {relative_name: Path} unless outputs are current."""
        prev = self.previous.get(name)
        if prev and prev.get("inputs_hash") == inputs_hash:
            outputs = prev.get("outputs", {})
            if all(
                (self.out / rel).is_file() and sha256_file(self.out / rel) == digest
                for rel, digest in outputs.items()
            ):
                logger.info("step %-12s skipped (outputs current)", name)
                self.manifest["steps"][name] = prev
                return {rel: self.out / rel for rel in outputs}
        start = time.monotonic()
        produced = fn()
        digests = {rel: sha256_file(path) for rel, path in sorted(produced.items())}
        self.manifest["steps"][name] = {"inputs_hash": inputs_hash, "outputs": digests}
        logger.info("step %-12s done in %.2fs (%d artifact(s))",
                    name, time.monotonic() - start, len(produced))
        return produced

    def step_inputs(self, params: dict, files: dict) -> str:
        return _hash_obj({"params": params, "files": dict(sorted(files.items()))})

    def finalize(self) -> Path:
        path = self.out / "manifest.json"
        _write_json(path, self.manifest)
        return path


def _bundled_digest(key: str) -> str:
    from importlib import resources

    suffix = "tsv" if key == "emoji_names" else "txt"
    if key == "sentiment_lexicon":
        suffix = "tsv"
    data = resources.files("lenslevel").joinpath("data", f"{key}.{suffix}").read_bytes()
    return hashlib.sha256(data).hexdigest()


# ---------------------------------------------------------------------------
# step implementations


def step_ingest(runner: PipelineRunner) -> dict:
    cfg = runner.config

    def fn():
        users_res = load_table(cfg.users, "users")
        photos_res = load_table(cfg.photos, "photos")
        comments_res = load_table(cfg.comments, "comments")
        photos_ok, comments_ok, ref_rejects = validate_references(
            users_res.rows, photos_res.rows, comments_res.rows
        )
        users, photos, comments = apply_snapshot_filters(
            users_res.rows, photos_ok, comments_ok, cfg.snapshot
        )
        out = {}
        for name, rows in (("users.jsonl", users), ("photos.jsonl", photos),
                           ("comments.jsonl", comments)):
            save_table(rows, runner.artifact(name))
            out[name] = runner.artifact(name)
        reject_rows = []
        for table, res in (("users", users_res), ("photos", photos_res),
                           ("comments", comments_res)):
            for row_no, reason in res.rejects:
                reject_rows.append({"table": table, "row": row_no, "reason": reason})
        for table, key, reason in ref_rejects:
            reject_rows.append({"table": table, "key": key, "reason": reason})
        _write_jsonl(runner.artifact("rejects.jsonl"), reject_rows)
        out["rejects.jsonl"] = runner.artifact("rejects.jsonl")
        logger.info("ingest: kept %d users, %d photos, %d comments (%d rejects)",
                    len(users), len(photos), len(comments), len(reject_rows))
        return out

    inputs_hash = runner.step_inputs(
        params={
            "reference_date": cfg.snapshot.reference_date.isoformat(),
            "activity_ratio_cutoff": cfg.snapshot.activity_ratio_cutoff,
            "trim_fraction": cfg.snapshot.trim_fraction,
        },
        files={k: runner.input_digests[k] for k in ("users", "photos", "comments")},
    )
    return runner.run_step("ingest", inputs_hash, fn)


def step_textprep(runner: PipelineRunner) -> dict:
    cfg = runner.config
    comments_path = runner.artifact("comments.jsonl")

    def fn():
        comments = load_table(comments_path, "comments").rows
        stopwords = load_stopwords(cfg.data_files.get("stopwords"))
        emoji_map = load_emoji_map(cfg.data_files.get("emoji_names"))
        clean_rows, dropped_rows = [], []
        photo_by_comment = {c.comment_id: c.photo_id for c in comments}
        for c in comments:
            result = normalize_comment(c, stopwords, emoji_map)
            if isinstance(result, CleanComment):
                clean_rows.append({
                    "comment_id": result.comment_id,
                    "photo_id": photo_by_comment[result.comment_id],
                    "tokens": list(result.tokens),
                    "char_text": result.char_text,
                    "original_length": result.original_length,
                })
            else:
                dropped_rows.append({"comment_id": result.comment_id,
                                     "reason": result.reason})
        _write_jsonl(runner.artifact("clean_comments.jsonl"), clean_rows)
        _write_jsonl(runner.artifact("dropped_comments.jsonl"), dropped_rows)
        logger.info("textprep: %d clean, %d dropped", len(clean_rows), len(dropped_rows))
        return {"clean_comments.jsonl": runner.artifact("clean_comments.jsonl"),
                "dropped_comments.jsonl": runner.artifact("dropped_comments.jsonl")}

    inputs_hash = runner.step_inputs(
        params={},
        files={"comments": sha256_file(comments_path),
               "stopwords": runner.input_digests["stopwords"],
               "emoji_names": runner.input_digests["emoji_names"]},
    )
    return runner.run_step("textprep", inputs_hash, fn)


def step_textfeat(runner: PipelineRunner) -> dict:
    cfg = runner.config
    clean_path = runner.artifact("clean_comments.jsonl")

    def fn():
        lex = load_sentiment_lexicon(cfg.data_files.get("sentiment_lexicon"))
        easy = load_easy_words(cfg.data_files.get("easy_words"))
        rows = []
        for raw in _read_jsonl(clean_path):
            clean = CleanComment(
                comment_id=raw["comment_id"],
                tokens=tuple(raw["tokens"]),
                char_text=raw["char_text"],
                original_length=raw["original_length"],
            )
            feats = compute_features(clean, lex, easy, cfg.reading_seconds_per_char)
            rows.append({
                "comment_id": feats.comment_id,
                "photo_id": raw["photo_id"],
                "polarity": feats.polarity,
                "subjectivity": feats.subjectivity,
                "difficult_words": feats.difficult_words,
                "reading_time_s": feats.reading_time_s,
                "entropy_bits": feats.entropy_bits,
                "length_chars": feats.length_chars,
            })
        _write_jsonl(runner.artifact("comment_features.jsonl"), rows)
        return {"comment_features.jsonl": runner.artifact("comment_features.jsonl")}

    inputs_hash = runner.step_inputs(
        params={"reading_seconds_per_char": cfg.reading_seconds_per_char},
        files={"clean_comments": sha256_file(clean_path),
               "sentiment_lexicon": runner.input_digests["sentiment_lexicon"],
               "easy_words": runner.input_digests["easy_words"]},
    )
    return runner.run_step("textfeat", inputs_hash, fn)


def step_label(runner: PipelineRunner) -> dict:
    users_path = runner.artifact("users.jsonl")

    def fn():
        users = load_table(users_path, "users").rows
        vector = label_users(users)
        rows = [
            {"user_id": uid, "is_professional": vector.labels[uid],
             "matched_term": vector.matched_terms[uid]}
            for uid in sorted(vector.labels)
        ]
        _write_jsonl(runner.artifact("labels.jsonl"), rows)
        _write_json(runner.artifact("label_summary.json"), {
            "total": len(vector),
            "positive_count": vector.positive_count,
            "prevalence": vector.prevalence,
        })
        logger.info("label: %d/%d professional (prevalence %.4f)",
                    vector.positive_count, len(vector), vector.prevalence)
        return {"labels.jsonl": runner.artifact("labels.jsonl"),
                "label_summary.json": runner.artifact("label_summary.json")}

    inputs_hash = runner.step_inputs(
        params={}, files={"users": sha256_file(users_path)}
    )
    return runner.run_step("label", inputs_hash, fn)


def _load_comment_features(path) -> tuple[dict, dict]:
    """comment_id -> CommentFeatures and comment_id -> photo_id."""
    feats, photo_of = {}, {}
    for raw in _read_jsonl(path):
        cid = raw["comment_id"]
        photo_of[cid] = raw["photo_id"]
        feats[cid] = CommentFeatures(
            comment_id=cid,
            polarity=raw["polarity"],
            subjectivity=raw["subjectivity"],
            difficult_words=raw["difficult_words"],
            reading_time_s=raw["reading_time_s"],
            entropy_bits=raw["entropy_bits"],
            length_chars=raw["length_chars"],
        )
    return feats, photo_of


def featurize_sets(runner: PipelineRunner) -> list[str]:
    """Feature sets materialized by the featurize step.

    Always includes user+photo (characterization) and all (correlation,
    RQ2 column subsets) on top of the configured evaluation sets.
    """
    sets = list(dict.fromkeys(list(runner.config.feature_sets) + ["user+photo", "all"]))
    return sets


def step_featurize(runner: PipelineRunner) -> dict:
    cfg = runner.config
    users_path = runner.artifact("users.jsonl")
    photos_path = runner.artifact("photos.jsonl")
    comments_path = runner.artifact("comments.jsonl")
    feats_path = runner.artifact("comment_features.jsonl")
    sets = featurize_sets(runner)

    def fn():
        users = load_table(users_path, "users").rows
        photos = load_table(photos_path, "photos").rows
        comments = load_table(comments_path, "comments").rows
        feats_by_comment, _ = _load_comment_features(feats_path)
        aggregates = aggregate_users(photos, comments, feats_by_comment, cfg.snapshot)
        out = {}
        columns_by_set = {}
        for set_id in sets:
            matrix = assemble(set_id, aggregates, users, cfg.snapshot)
            name = f"features_{set_id}.csv"
            matrix.to_csv(runner.artifact(name))
            out[name] = runner.artifact(name)
            columns_by_set[set_id] = list(matrix.column_names)
        _write_json(runner.artifact("features_manifest.json"),
                    {"sets": columns_by_set})
        out["features_manifest.json"] = runner.artifact("features_manifest.json")
        return out

    inputs_hash = runner.step_inputs(
        params={"sets": sets,
                "reference_date": cfg.snapshot.reference_date.isoformat()},
        files={"users": sha256_file(users_path),
               "photos": sha256_file(photos_path),
               "comments": sha256_file(comments_path),
               "comment_features": sha256_file(feats_path)},
    )
    return runner.run_step("featurize", inputs_hash, fn)


def load_labels_file(path) -> dict:
    return {row["user_id"]: bool(row["is_professional"]) for row in _read_jsonl(path)}


def step_evaluate(runner: PipelineRunner) -> dict:
    """The Table-2 grid over configured models/sets plus the RQ2 comparison."""
    cfg = runner.config
    labels_path = runner.artifact("labels.jsonl")
    feature_files = {s: runner.artifact(f"features_{s}.csv") for s in featurize_sets(runner)}

    def fn():
        labels = load_labels_file(labels_path)
        reports_dir = runner.artifact("reports")
        reports_dir.mkdir(exist_ok=True)
        out = {}
        table2_rows = []
        for spec in cfg.models:
            for set_id in cfg.feature_sets:
                matrix = FeatureMatrix.from_csv(feature_files[set_id], set_id)
                report = cross_validate(spec, matrix, labels, k=cfg.k, seed=cfg.seed)
                rel = f"reports/report_{spec.kind}_{set_id}.json"
                _write_json(runner.artifact(rel), report.to_dict())
                out[rel] = runner.artifact(rel)
                table2_rows.append((spec.kind, set_id, report))
        _write_table(runner.artifact("table2.csv"), table2_rows)
        _write_table_md(runner.artifact("table2.md"), table2_rows)
        out["table2.csv"] = runner.artifact("table2.csv")
        out["table2.md"] = runner.artifact("table2.md")

        # RQ2: the forest on quality-score columns vs social-activity columns
        all_matrix = FeatureMatrix.from_csv(feature_files["all"], "all")
        rf_spec = next((m for m in cfg.models if m.kind == "random_forest"),
                       ModelSpec(kind="random_forest"))
        table3_rows = []
        for rq2_id, column_fn in RQ2_SETS.items():
            subset = select_columns(all_matrix, column_fn(), rq2_id)
            report = cross_validate(rf_spec, subset, labels, k=cfg.k, seed=cfg.seed)
            rel = f"reports/report_random_forest_{rq2_id}.json"
            _write_json(runner.artifact(rel), report.to_dict())
            out[rel] = runner.artifact(rel)
            table3_rows.append(("random_forest", rq2_id, report))
        _write_table(runner.artifact("table3.csv"), table3_rows)
        out["table3.csv"] = runner.artifact("table3.csv")
        return out

    inputs_hash = runner.step_inputs(
        params={"models": [{"kind": m.kind, "params": m.params} for m in cfg.models],
                "feature_sets": list(cfg.feature_sets),
                "k": cfg.k, "seed": cfg.seed},
        files={"labels": sha256_file(labels_path),
               **{f"features_{s}": sha256_file(p) for s, p in feature_files.items()}},
    )
    return runner.run_step("evaluate", inputs_hash, fn)


def _write_table(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["model", "feature_set", "accuracy", "auc", "f1"])
        for kind, set_id, report in rows:
            writer.writerow([kind, set_id, repr(report.accuracy),
                             repr(report.auc), repr(report.f1)])


def _write_table_md(path, rows) -> None:
    lines = ["| model | feature set | accuracy | AUC | F1 |",
             "|---|---|---|---|---|"]
    for kind, set_id, report in rows:
        lines.append(f"| {kind} | {set_id} | {report.accuracy:.4f} "
                     f"| {report.auc:.4f} | {report.f1:.4f} |")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def correlation_columns() -> list[str]:
    return social_activity_columns() + aesthetics_technical_columns()


def step_correlate(runner: PipelineRunner) -> dict:
    features_path = runner.artifact("features_all.csv")

    def fn():
        matrix = FeatureMatrix.from_csv(features_path, "all")
        columns = correlation_columns()
        subset = select_columns(matrix, columns, "correlation")
        corr = pearson_matrix(subset.X, columns)
        corr.to_csv(runner.artifact("correlation.csv"))
        return {"correlation.csv": runner.artifact("correlation.csv")}

    inputs_hash = runner.step_inputs(
        params={"columns": correlation_columns()},
        files={"features_all": sha256_file(features_path)},
    )
    return runner.run_step("correlate", inputs_hash, fn)


def step_characterize(runner: PipelineRunner, use_ground_truth: bool = False) -> dict:
    cfg = runner.config
    features_path = runner.artifact("features_user+photo.csv")
    labels_path = runner.artifact("labels.jsonl")

    def fn():
        matrix = FeatureMatrix.from_csv(features_path, "user+photo")
        labels = load_labels_file(labels_path)
        if use_ground_truth:
            pred = np.array([labels[u] for u in matrix.user_ids])
        else:
            rf_spec = next((m for m in cfg.models if m.kind == "random_forest"),
                           ModelSpec(kind="random_forest"))
            eval_report = cross_validate(rf_spec, matrix, labels, k=cfg.k, seed=cfg.seed)
            pred = eval_report.oof_scores >= 0.5
        report = characterize(pred, matrix)
        _write_json(runner.artifact("characterization.json"), report.to_dict())
        runner.artifact("characterization.md").write_text(
            report.to_markdown(), encoding="utf-8"
        )
        with open(runner.artifact("anova.csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "F", "p_value", "significant"])
            for name, test in zip(report.column_names, report.anova):
                writer.writerow([name, repr(test.statistic), repr(test.p_value),
                                 str(test.significant).lower()])
        with open(runner.artifact("characterization_bars.csv"), "w", newline="",
                  encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["feature", "mean_professional", "mean_non_professional",
                             "significant"])
            for i, name in enumerate(report.column_names):
                writer.writerow([
                    name,
                    repr(report.means["professional"][i]),
                    repr(report.means["non_professional"][i]),
                    str(report.anova[i].significant).lower(),
                ])
        return {name: runner.artifact(name)
                for name in ("characterization.json", "characterization.md",
                             "anova.csv", "characterization_bars.csv")}

    inputs_hash = runner.step_inputs(
        params={"k": cfg.k, "seed": cfg.seed, "use_ground_truth": use_ground_truth},
        files={"features_user+photo": sha256_file(features_path),
               "labels": sha256_file(labels_path)},
    )
    return runner.run_step("characterize", inputs_hash, fn)


PIPELINE_STEPS = ("ingest", "textprep", "textfeat", "label", "featurize",
                  "evaluate", "correlate", "characterize")


def run_pipeline(config: PipelineConfig, use_ground_truth: bool = False) -> Path:
    """Execute all steps in order; returns the manifest path."""
    runner = PipelineRunner(config)
    try:
        step_ingest(runner)
        step_textprep(runner)
        step_textfeat(runner)
        step_label(runner)
        step_featurize(runner)
        step_evaluate(runner)
        step_correlate(runner)
        step_characterize(runner, use_ground_truth=use_ground_truth)
    except Exception as exc:
        done = set(runner.manifest["steps"])
        failing = next((s for s in PIPELINE_STEPS if s not in done), "unknown")
        raise RuntimeError(f"pipeline halted at step {failing!r}: {exc}") from exc
    return runner.finalize()
