"""Command line interface.

    lenslevel run --config lenslevel.json --out RUN_DIR
    lenslevel ingest --users F --photos F --comments F --out DIR
    lenslevel textprep --comments F --out F
    lenslevel textfeat --clean F --out F
    lenslevel label --users F --out F
    lenslevel featurize --users F --photos F --comments F --comment-features F --set S --out DIR
    lenslevel train --features F --labels F --model M --set S --k 10 --seed N --out F
    lenslevel evaluate-all --config F --out DIR
    lenslevel correlate --features F --out F
    lenslevel characterize --features F --labels F --out DIR
    lenslevel sample --out DIR

Exit codes: 0 success, 2 validation failure (bad config, missing or
malformed input), 1 any other error. Logs go to stderr, artifacts to the
requested output paths.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from datetime import date
from pathlib import Path

from . import __version__
from .dataset import SchemaError, SnapshotConfig, load_table
from .features import (
    FEATURE_SETS,
    FeatureMatrix,
    aggregate_users,
    assemble,
    select_columns,
)
from .labeler import label_users
from .learn import ModelSpec, cross_validate
from .learn.evaluate import MODEL_KINDS
from .pipeline import (
    ConfigError,
    PipelineConfig,
    PipelineRunner,
    _load_comment_features,
    _write_json,
    _write_jsonl,
    correlation_columns,
    load_labels_file,
    run_pipeline,
    step_evaluate,
    step_ingest,
)
from .sample import generate_sample
from .stats import characterize, pearson_matrix
from .textfeat import (
    READING_SECONDS_PER_CHAR,
    compute_features,
    load_easy_words,
    load_sentiment_lexicon,
)
from .textprep import CleanComment, load_emoji_map, load_stopwords, normalize_comment

logger = logging.getLogger("lenslevel")


def _snapshot_from_args(args) -> SnapshotConfig:
    return SnapshotConfig(
        reference_date=date.fromisoformat(args.reference_date),
        activity_ratio_cutoff=args.activity_cutoff,
        trim_fraction=args.trim_fraction,
    )


def _config_for_files(args, out_dir) -> PipelineConfig:
    if getattr(args, "config", None):
        cfg = PipelineConfig.from_file(args.config, out_dir=out_dir)
        for role in ("users", "photos", "comments"):
            override = getattr(args, role, None)
            if override:
                setattr(cfg, role, Path(override))
        return cfg
    missing = [r for r in ("users", "photos", "comments") if not getattr(args, r, None)]
    if missing:
        raise ConfigError(f"--{'/--'.join(missing)} required when no --config is given")
    return PipelineConfig(
        users=Path(args.users),
        photos=Path(args.photos),
        comments=Path(args.comments),
        out_dir=Path(out_dir),
        snapshot=_snapshot_from_args(args),
    )


def cmd_ingest(args) -> int:
    cfg = _config_for_files(args, args.out)
    runner = PipelineRunner(cfg)
    step_ingest(runner)
    runner.finalize()
    return 0


def cmd_textprep(args) -> int:
    comments = load_table(args.comments, "comments").rows
    stopwords = load_stopwords(args.stopwords)
    emoji_map = load_emoji_map(args.emoji_names)
    photo_by_comment = {c.comment_id: c.photo_id for c in comments}
    clean_rows, dropped = [], 0
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
            dropped += 1
    _write_jsonl(args.out, clean_rows)
    logger.info("textprep: wrote %d clean comment(s), dropped %d", len(clean_rows), dropped)
    return 0


def cmd_textfeat(args) -> int:
    lex = load_sentiment_lexicon(args.lexicon)
    easy = load_easy_words(args.easy_words)
    rows = []
    with open(args.clean, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            raw = json.loads(line)
            clean = CleanComment(
                comment_id=raw["comment_id"],
                tokens=tuple(raw["tokens"]),
                char_text=raw["char_text"],
                original_length=raw["original_length"],
            )
            feats = compute_features(clean, lex, easy, args.seconds_per_char)
            rows.append({
                "comment_id": feats.comment_id,
                "photo_id": raw.get("photo_id"),
                "polarity": feats.polarity,
                "subjectivity": feats.subjectivity,
                "difficult_words": feats.difficult_words,
                "reading_time_s": feats.reading_time_s,
                "entropy_bits": feats.entropy_bits,
                "length_chars": feats.length_chars,
            })
    _write_jsonl(args.out, rows)
    logger.info("textfeat: wrote %d feature row(s)", len(rows))
    return 0


def cmd_label(args) -> int:
    users = load_table(args.users, "users").rows
    vector = label_users(users)
    rows = [
        {"user_id": uid, "is_professional": vector.labels[uid],
         "matched_term": vector.matched_terms[uid]}
        for uid in sorted(vector.labels)
    ]
    _write_jsonl(args.out, rows)
    logger.info("label: %d/%d professional (prevalence %.4f)",
                vector.positive_count, len(vector), vector.prevalence)
    return 0


def cmd_featurize(args) -> int:
    cfg_snapshot = _snapshot_from_args(args)
    users = load_table(args.users, "users").rows
    photos = load_table(args.photos, "photos").rows
    comments = load_table(args.comments, "comments").rows
    feats_by_comment, _ = _load_comment_features(args.comment_features)
    aggregates = aggregate_users(photos, comments, feats_by_comment, cfg_snapshot)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    sets = list(FEATURE_SETS) if args.set == "all-sets" else [args.set]
    columns_by_set = {}
    for set_id in sets:
        matrix = assemble(set_id, aggregates, users, cfg_snapshot)
        matrix.to_csv(out_dir / f"features_{set_id}.csv")
        columns_by_set[set_id] = list(matrix.column_names)
    _write_json(out_dir / "features_manifest.json", {"sets": columns_by_set})
    logger.info("featurize: wrote %d set(s) to %s", len(sets), out_dir)
    return 0


def cmd_train(args) -> int:
    matrix = FeatureMatrix.from_csv(args.features, args.set)
    labels = load_labels_file(args.labels)
    spec = ModelSpec(kind=args.model, seed=args.seed,
                     params=json.loads(args.params) if args.params else {})
    report = cross_validate(spec, matrix, labels, k=args.k, seed=args.seed)
    _write_json(args.out, report.to_dict())
    logger.info("train: %s on %s -> accuracy %.4f, AUC %.4f, F1 %.4f",
                args.model, args.set, report.accuracy, report.auc, report.f1)
    return 0


def cmd_evaluate_all(args) -> int:
    cfg = PipelineConfig.from_file(args.config, out_dir=args.out)
    runner = PipelineRunner(cfg)
    step_evaluate(runner)
    runner.finalize()
    return 0


def cmd_correlate(args) -> int:
    matrix = FeatureMatrix.from_csv(args.features, "all")
    columns = [c for c in correlation_columns() if c in matrix.column_names]
    subset = select_columns(matrix, columns, "correlation")
    corr = pearson_matrix(subset.X, columns)
    corr.to_csv(args.out)
    logger.info("correlate: wrote %dx%d matrix to %s", len(columns), len(columns), args.out)
    return 0


def cmd_characterize(args) -> int:
    matrix = FeatureMatrix.from_csv(args.features, "user+photo")
    labels = load_labels_file(args.labels)
    if args.use_ground_truth:
        pred = {u: labels[u] for u in matrix.user_ids}
    else:
        spec = ModelSpec(kind="random_forest")
        eval_report = cross_validate(spec, matrix, labels, k=args.k, seed=args.seed)
        pred = eval_report.oof_scores >= 0.5
    report = characterize(pred, matrix)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(out_dir / "characterization.json", report.to_dict())
    (out_dir / "characterization.md").write_text(report.to_markdown(), encoding="utf-8")
    logger.info("characterize: MANOVA F=%.4g p=%.4g (%d vs %d users)",
                report.manova.statistic, report.manova.p_value,
                report.class_sizes["professional"], report.class_sizes["non_professional"])
    return 0


def cmd_run(args) -> int:
    cfg = PipelineConfig.from_file(args.config, out_dir=args.out)
    manifest = run_pipeline(cfg, use_ground_truth=args.use_ground_truth)
    logger.info("run complete; manifest at %s", manifest)
    return 0


def cmd_sample(args) -> int:
    paths = generate_sample(args.out, n_users=args.users, seed=args.seed)
    logger.info("sample fixture written: %s", ", ".join(sorted(paths)))
    return 0


def _add_snapshot_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--reference-date", default="2021-12-31",
                   help="snapshot reference date (ISO, default 2021-12-31)")
    p.add_argument("--activity-cutoff", type=float, default=0.20, dest="activity_cutoff")
    p.add_argument("--trim-fraction", type=float, default=0.05, dest="trim_fraction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lenslevel",
        description="Photography-expertise pipeline: ingest, featurize, train, characterize.",
    )
    parser.add_argument("--version", action="version", version=f"lenslevel {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load, validate, and filter the raw tables")
    p.add_argument("--users", required=False)
    p.add_argument("--photos", required=False)
    p.add_argument("--comments", required=False)
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="run directory")
    _add_snapshot_args(p)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("textprep", help="normalize ingested comments")
    p.add_argument("--comments", required=True, help="ingested comments.jsonl")
    p.add_argument("--out", required=True, help="clean comments JSONL")
    p.add_argument("--stopwords")
    p.add_argument("--emoji-names", dest="emoji_names")
    p.set_defaults(fn=cmd_textprep)

    p = sub.add_parser("textfeat", help="compute per-comment measures")
    p.add_argument("--clean", required=True, help="clean comments JSONL")
    p.add_argument("--out", required=True, help="comment features JSONL")
    p.add_argument("--lexicon")
    p.add_argument("--easy-words", dest="easy_words")
    p.add_argument("--seconds-per-char", type=float, default=READING_SECONDS_PER_CHAR,
                   dest="seconds_per_char")
    p.set_defaults(fn=cmd_textfeat)

    p = sub.add_parser("label", help="ground-truth labels from occupations")
    p.add_argument("--users", required=True, help="ingested users.jsonl")
    p.add_argument("--out", required=True, help="labels JSONL")
    p.set_defaults(fn=cmd_label)

    p = sub.add_parser("featurize", help="assemble per-user feature matrices")
    p.add_argument("--users", required=True)
    p.add_argument("--photos", required=True)
    p.add_argument("--comments", required=True)
    p.add_argument("--comment-features", required=True, dest="comment_features")
    p.add_argument("--set", default="all-sets",
                   choices=list(FEATURE_SETS) + ["all-sets"])
    p.add_argument("--out", required=True, help="output directory")
    _add_snapshot_args(p)
    p.set_defaults(fn=cmd_featurize)

    p = sub.add_parser("train", help="cross-validate one model on one feature set")
    p.add_argument("--features", required=True, help="features CSV")
    p.add_argument("--labels", required=True, help="labels JSONL")
    p.add_argument("--model", required=True, choices=list(MODEL_KINDS))
    p.add_argument("--set", default="", help="feature set id for the report")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", help="JSON dict of hyperparameter overrides")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate-all", help="the full model x feature-set grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="run directory with featurize artifacts")
    p.set_defaults(fn=cmd_evaluate_all)

    p = sub.add_parser("correlate", help="correlation matrix of activity and score columns")
    p.add_argument("--features", required=True, help="features_all.csv")
    p.add_argument("--out", required=True, help="correlation CSV")
    p.set_defaults(fn=cmd_correlate)

    p = sub.add_parser("characterize", help="class characterization with ANOVA/MANOVA")
    p.add_argument("--features", required=True, help="features_user+photo.csv")
    p.add_argument("--labels", required=True, help="labels JSONL")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--use-ground-truth", action="store_true",
                   help="characterize ground-truth classes instead of model predictions")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=cmd_characterize)

    p = sub.add_parser("run", help="execute the whole pipeline with caching")
    p.add_argument("--config", required=True)
    p.add_argument("--out", help="run directory (defaults to the config's out)")
    p.add_argument("--use-ground-truth", action="store_true")
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("sample", help="generate the bundled synthetic fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--users", type=int, default=200)
    p.add_argument("--seed", type=int, default=20211231)
    p.set_defaults(fn=cmd_sample)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.fn(args)
    except (ConfigError, SchemaError, FileNotFoundError) as exc:
        logger.error("%s", exc)
        return 2
    except ValueError as exc:
        logger.error("%s", exc)
        return 2
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        logger.error("unexpected failure: %s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
