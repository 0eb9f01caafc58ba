"""Command-line entry points: train, eval, predict, embed.

stdout carries machine-parseable output only (JSON, JSONL, CSV paths);
everything meant for humans goes to stderr. The SWDE_LOG environment
variable picks the stderr verbosity (debug, info, warning, error).

Exit codes: 0 success, 2 corpus problems, 3 configuration problems,
4 numeric failures, 5 unlabeled posts where labels are required,
6 model-container problems.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys

from swde.container import load_model, save_model
from swde.corpus import LoadResult, Post, load_jsonl, tokenize
from swde.errors import (
    ConfigError,
    ContainerError,
    CorpusError,
    DegenerateInputError,
    NumericError,
    SwdeError,
    UnlabeledPostsError,
)
from swde.evaluation import compare_to_table1, evaluate, format_table1_comparison
from swde.model import doc_vectors_for, score_post
from swde.trainer import TrainConfig, train

log = logging.getLogger("swde")

EXIT_CODES = (
    (CorpusError, 2),
    (DegenerateInputError, 2),  # corpus too small/empty for the operation
    (ConfigError, 3),
    (NumericError, 4),
    (UnlabeledPostsError, 5),
    (ContainerError, 6),
)


def _configure_logging() -> None:
    level_name = os.environ.get("SWDE_LOG", "warning").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(message)s")


def _load_config(path: str | None, seed: int | None) -> TrainConfig:
    if path is None:
        config = TrainConfig()
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
        config = TrainConfig.from_dict(raw)
    if seed is not None:
        config = dataclasses.replace(config, seed=seed)
    config.validate()
    return config


def _load_corpus(path: str) -> LoadResult:
    result = load_jsonl(path)
    if result.malformed:
        log.warning("skipped %d malformed corpus line(s)", result.malformed)
    if result.empty_title_ids:
        log.info("%d record(s) with empty titles", len(result.empty_title_ids))
    return result


def cmd_train(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args.seed)
    loaded = _load_corpus(args.corpus)
    log.info("training on %d posts", len(loaded.posts))
    result = train(loaded.posts, config)

    save_model(result.model, args.out)
    csv_path = args.out + ".losses.csv"
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write("epoch,train_loss,val_loss\n")
        for row in result.trace:
            fh.write(f"{row.epoch},{row.train_loss!r},{row.val_loss!r}\n")

    last = result.trace[-1]
    print(
        json.dumps(
            {
                "model": args.out,
                "losses_csv": csv_path,
                "epochs_run": len(result.trace),
                "final_train_loss": last.train_loss,
                "final_val_loss": last.val_loss,
            },
            sort_keys=True,
        )
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    loaded = _load_corpus(args.corpus)
    metrics = evaluate(model, loaded.posts, threshold=args.threshold)
    report = compare_to_table1(metrics)
    report.update(
        {
            "tp": metrics.tp, "fp": metrics.fp, "tn": metrics.tn, "fn": metrics.fn,
            "precision": metrics.precision, "recall": metrics.recall,
            "threshold": args.threshold,
        }
    )
    print(json.dumps(report, sort_keys=True))
    print(format_table1_comparison(report), file=sys.stderr)
    return 0


def _emit_prediction(model, post: Post, threshold: float) -> None:
    prob = score_post(model, post)
    print(
        json.dumps(
            {"id": post.id, "probability": prob, "label": int(prob >= threshold)},
            sort_keys=True,
        )
    )


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    if args.title is not None:
        post = Post(id="-", title=args.title, body=args.body or "")
        if not tokenize(post.title):
            print(json.dumps({"id": post.id, "error": "empty title"}, sort_keys=True))
            return 0
        _emit_prediction(model, post, args.threshold)
        return 0
    if args.corpus is None:
        raise ConfigError("predict needs --corpus or --title")
    loaded = _load_corpus(args.corpus)
    for post in loaded.posts:
        _emit_prediction(model, post, args.threshold)
    for post_id in loaded.empty_title_ids:
        print(json.dumps({"id": post_id, "error": "empty title"}, sort_keys=True))
    return 0


def cmd_embed(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    loaded = _load_corpus(args.corpus)
    for post in loaded.posts:
        title_vec, body_vec = doc_vectors_for(model, post)
        print(
            json.dumps(
                {
                    "id": post.id,
                    "title_vector": title_vec.tolist(),
                    "body_vector": body_vec.tolist(),
                },
                sort_keys=True,
            )
        )
    for post_id in loaded.empty_title_ids:
        print(json.dumps({"id": post_id, "error": "empty title"}, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swde", description="Clickbait detection: train, evaluate, predict, embed."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit a model and write a container file")
    p_train.add_argument("--corpus", required=True, help="JSONL corpus path")
    p_train.add_argument("--config", help="JSON training config path")
    p_train.add_argument("--out", required=True, help="output model container path")
    p_train.add_argument("--seed", type=int, help="override the config seed")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="score a labeled corpus and report metrics")
    p_eval.add_argument("--model", required=True, help="model container path")
    p_eval.add_argument("--corpus", required=True, help="JSONL corpus path")
    p_eval.add_argument("--threshold", type=float, default=0.5)
    p_eval.set_defaults(func=cmd_eval)

    p_predict = sub.add_parser("predict", help="emit per-post probabilities as JSONL")
    p_predict.add_argument("--model", required=True, help="model container path")
    p_predict.add_argument("--corpus", help="JSONL corpus path")
    p_predict.add_argument("--title", help="score a single title instead of a corpus")
    p_predict.add_argument("--body", help="body text for --title")
    p_predict.add_argument("--threshold", type=float, default=0.5)
    p_predict.set_defaults(func=cmd_predict)

    p_embed = sub.add_parser("embed", help="emit per-post document vectors as JSONL")
    p_embed.add_argument("--model", required=True, help="model container path")
    p_embed.add_argument("--corpus", required=True, help="JSONL corpus path")
    p_embed.set_defaults(func=cmd_embed)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging()
    try:
        return args.func(args)
    except SwdeError as exc:
        for klass, code in EXIT_CODES:
            if isinstance(exc, klass):
                log.error("%s", exc)
                return code
        log.error("%s", exc)
        return 4


if __name__ == "__main__":
    sys.exit(main())
