"""The ctxhs command: one entry point for the whole pipeline.

Subcommands: ingest, sample, serve, gold, agreement, stats, adapt, train,
evaluate, report, error-analysis, cooccurrence. Artifacts land in the run
directory (flag --run-dir, or the CTXHS_RUN_DIR environment variable, or
./runs). Structured logs go to stderr; every subcommand overwrites its own
artifacts deterministically, so reruns with identical inputs and seeds are
idempotent.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import classifier, corpus, evalreport, pipeline
from .annotation import agreement_report, compute_all_gold_labels, dataset_statistics
from .annotation.api import create_app
from .annotation.store import AnnotationStore
from .types import (
    AnnotationRecord,
    Comment,
    ConfigurationError,
    ContextMode,
    GoldLabel,
    SamplingConfig,
)

logger = logging.getLogger("ctxhs")

BINARY_REPORT_ROWS = ["hateful.precision", "hateful.recall", "hateful.f1", "macro_f1"]
FINE_REPORT_ROWS = [
    "CALLS.f1", "POLITICS.f1", "APPEARANCE.f1", "DISABLED.f1", "WOMEN.f1",
    "RACISM.f1", "CLASS.f1", "LGBTI.f1", "CRIMINAL.f1",
    "macro_f1", "macro_precision", "macro_recall",
]


def run_root(args) -> Path:
    root = Path(getattr(args, "run_dir", None) or os.environ.get("CTXHS_RUN_DIR", "runs"))
    root.mkdir(parents=True, exist_ok=True)
    return root


def load_gold(path) -> list[GoldLabel]:
    return [GoldLabel.from_dict(d) for d in corpus.read_jsonl(path)]


def load_records(path) -> list[AnnotationRecord]:
    return [AnnotationRecord.from_dict(d) for d in corpus.read_jsonl(path)]


def write_json(path, payload) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )


# ---------------------------------------------------------------------------
# corpus subcommands
# ---------------------------------------------------------------------------


def cmd_ingest(args) -> int:
    keywords = corpus.load_covid_keywords(args.keywords)
    articles = corpus.read_articles(args.articles)
    comments = corpus.read_comments(args.comments)
    kept_articles, kept_comments = corpus.run_ingest(articles, comments, keywords)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus.write_jsonl(out / "articles.jsonl", (a.to_dict() for a in kept_articles))
    corpus.write_jsonl(out / "comments.jsonl", (c.to_dict() for c in kept_comments))
    logger.info(
        "ingest: kept %d/%d articles, %d/%d comments",
        len(kept_articles), len(articles), len(kept_comments), len(comments),
    )
    return 0


def cmd_sample(args) -> int:
    cfg = SamplingConfig(
        min_marked_comments=args.min_marked,
        comments_per_article=args.per_article,
        rng_seed=args.seed,
    )
    lexicon = corpus.load_lexicon(args.lexicon)
    articles = corpus.read_articles(args.articles)
    comments = corpus.read_comments(args.comments)
    rows, report = corpus.run_sampling(articles, comments, lexicon, cfg)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    corpus.write_jsonl(out / "sampled.jsonl", rows)
    write_json(out / "sampling_report.json", report)
    logger.info(
        "sample: %d articles selected, %d comments sampled",
        report["selected_articles"], report["total"]["comments"],
    )
    return 0


def cmd_serve(args) -> int:
    pool = [p.strip() for p in args.pool.split(",") if p.strip()]
    store = AnnotationStore(pool, persist_path=args.log)
    articles = {a.article_id: a for a in corpus.read_articles(args.articles)}
    sampled: dict[str, list[Comment]] = {}
    for row in corpus.read_jsonl(args.sampled):
        sampled.setdefault(row["article_id"], []).append(
            Comment(comment_id=row["comment_id"], article_id=row["article_id"],
                    text=row["text"])
        )
    for article_id, comments in sampled.items():
        store.add_article(articles[article_id], comments)
    store.recover()
    store.assign_all()
    logger.info("serving %d articles to a pool of %d annotators", len(sampled), len(pool))
    import uvicorn

    uvicorn.run(create_app(store), host=args.host, port=args.port, log_level="info")
    return 0


# ---------------------------------------------------------------------------
# annotation subcommands
# ---------------------------------------------------------------------------


def cmd_gold(args) -> int:
    records = load_records(args.records)
    gold = compute_all_gold_labels(records, strict=not args.lenient)
    corpus.write_jsonl(args.out, (g.to_dict() for g in gold))
    logger.info("gold: %d comments aggregated (%d hateful)",
                len(gold), sum(g.hateful for g in gold))
    return 0


def cmd_agreement(args) -> int:
    report = agreement_report(load_records(args.records)).to_dict()
    if args.out:
        write_json(args.out, report)
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0


def cmd_stats(args) -> int:
    stats = dataset_statistics(
        load_gold(args.gold),
        records=load_records(args.records) if args.records else None,
        comments=corpus.read_comments(args.comments) if args.comments else None,
        articles=corpus.read_articles(args.articles) if args.articles else None,
    )
    if args.out:
        write_json(args.out, stats)
    print(json.dumps(stats, indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# model subcommands
# ---------------------------------------------------------------------------


def _encoder_config(args, vocab_size: int) -> classifier.EncoderConfig:
    return classifier.EncoderConfig(
        vocab_size=vocab_size,
        dim=args.dim,
        layers=args.layers,
        heads=args.heads,
        ffn_dim=args.ffn_dim,
        max_len=512,
    )


def cmd_adapt(args) -> int:
    from .normalize import truncate_to_budget
    from .types import ModelInput

    mode = ContextMode.from_key(args.mode)
    rows = list(corpus.read_jsonl(args.corpus))
    tokenizer = classifier.WordTokenizer.build(
        [row.get("text_a", "") for row in rows] + [row["text_b"] for row in rows],
        vocab_size=args.vocab_size,
    )
    inputs = []
    for row in rows:
        text_a = row.get("text_a", "") if mode is not ContextMode.NONE else ""
        minput = ModelInput(text_a, row["text_b"], mode)
        inputs.append(truncate_to_budget(minput, tokenizer.pair_length))

    cfg = classifier.AdaptConfig(
        steps=args.steps,
        batch_size=args.batch_size,
        max_seq_len=mode.max_tokens,
        peak_lr=args.peak_lr,
        seed=args.seed,
    )
    encoder, losses = classifier.domain_adapt(
        inputs, tokenizer, _encoder_config(args, tokenizer.vocab_size), cfg
    )
    out = Path(args.out_dir) if args.out_dir else run_root(args) / "adapted" / mode.key
    classifier.save_adapted_encoder(out, encoder, tokenizer, cfg, mode, losses)
    logger.info("adapt: %d steps, loss %.4f -> %.4f, saved to %s",
                len(losses), losses[0], losses[-1], out)
    return 0


def _train_single(args, seed: int):
    """One full training run; returns (RunMetrics, run directory)."""
    mode = ContextMode.from_key(args.mode)
    gold = load_gold(args.gold)
    comments = corpus.read_comments(args.comments)
    articles = corpus.read_articles(args.articles)
    prepared = pipeline.prepare_dataset(
        gold, comments, articles, mode, args.task,
        split_seed=args.split_seed,
        test_fraction=args.test_fraction,
        dev_fraction=args.dev_fraction,
    )

    if args.encoder:
        encoder, tokenizer, _meta = classifier.load_adapted_encoder(args.encoder)
        classifier.set_all_seeds(seed)
    else:
        tokenizer = classifier.WordTokenizer.build(
            pipeline.corpus_texts(prepared.train + prepared.dev),
            vocab_size=args.vocab_size,
        )
        classifier.set_all_seeds(seed)
        encoder = classifier.TextEncoder(_encoder_config(args, tokenizer.vocab_size))

    train_set = pipeline.truncate_examples(prepared.train, tokenizer.pair_length)
    dev_set = pipeline.truncate_examples(prepared.dev, tokenizer.pair_length)
    test_set = pipeline.truncate_examples(prepared.test, tokenizer.pair_length)

    model = classifier.build_classifier(encoder, args.task)
    cfg = classifier.TrainConfig(
        peak_lr=args.peak_lr,
        weight_decay=args.weight_decay,
        warmup_fraction=args.warmup_fraction,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=seed,
    )
    result = classifier.train(model, tokenizer, train_set, dev_set, cfg)

    directory = classifier.run_dir(run_root(args), args.task, mode, seed)
    classifier.save_checkpoint(directory, model, tokenizer, cfg, result)

    predictions = classifier.predict(
        model, tokenizer, [ex.minput for ex in test_set], threshold=args.threshold
    )
    corpus.write_jsonl(
        directory / "predictions_test.jsonl",
        (
            {"comment_id": cid, "probs": [round(p, 8) for p in pred.probs],
             "labels": pred.labels}
            for cid, pred in zip(prepared.test_ids, predictions)
        ),
    )
    corpus.write_jsonl(directory / "test_texts.jsonl", prepared.test_texts)

    if args.task == "binary":
        metrics = evalreport.binary_metrics(
            [p.labels[0] for p in predictions],
            [ex.labels[0] for ex in test_set],
            seed=seed,
        )
    else:
        metrics = evalreport.finegrained_metrics(
            [p.labels for p in predictions],
            [ex.labels for ex in test_set],
            seed=seed,
        )
    write_json(directory / "metrics.json", metrics.flat())
    logger.info("run %s: dev F1 %.2f (epoch %d), test macro F1 %.2f",
                directory, result.best_dev_f1, result.best_epoch, metrics.macro_f1)
    return metrics, directory


def cmd_train(args) -> int:
    _train_single(args, args.seed)
    return 0


def cmd_evaluate(args) -> int:
    if args.seeds:
        seeds = [int(s) for s in args.seeds.split(",")]
    else:
        seeds = list(range(args.seed, args.seed + args.runs))
    if len(set(seeds)) != len(seeds):
        raise ConfigurationError("seeds must be distinct")
    runs = [_train_single(args, seed)[0] for seed in seeds]
    root = run_root(args)
    metrics_path = root / f"metrics_{args.task}_{args.mode}.csv"
    evalreport.write_metrics_csv(metrics_path, runs)
    aggregate = evalreport.aggregate_runs(runs)
    evalreport.write_aggregate_csv(root / "aggregate.csv", aggregate)
    rows = BINARY_REPORT_ROWS if args.task == "binary" else FINE_REPORT_ROWS
    print(evalreport.render_aggregate_table({args.mode: aggregate}, metrics=rows))
    return 0


def cmd_report(args) -> int:
    root = run_root(args)
    aggregates = {}
    for mode in args.modes.split(","):
        path = root / f"metrics_{args.task}_{mode}.csv"
        if not path.exists():
            logger.warning("no metrics file for mode %s (%s)", mode, path)
            continue
        runs = evalreport.read_metrics_csv(path)
        aggregates[mode] = evalreport.aggregate_runs(runs)
    if not aggregates:
        raise ConfigurationError("no metrics files found; run evaluate first")
    rows = BINARY_REPORT_ROWS if args.task == "binary" else FINE_REPORT_ROWS
    merged = {}
    for mode, aggregate in aggregates.items():
        for key, stats in aggregate.items():
            merged[f"{mode}.{key}"] = stats
    evalreport.write_aggregate_csv(root / "aggregate.csv", merged)
    print(evalreport.render_aggregate_table(aggregates, metrics=rows))
    return 0


def cmd_error_analysis(args) -> int:
    texts = list(corpus.read_jsonl(args.texts))
    order = [t["comment_id"] for t in texts]

    def labels_by_id(path) -> dict[str, int]:
        return {
            row["comment_id"]: int(row["labels"][0]) for row in corpus.read_jsonl(path)
        }

    ctx, noctx = labels_by_id(args.predictions_context), labels_by_id(args.predictions_no_context)
    gold_by_id = {g.comment_id: int(g.hateful) for g in load_gold(args.gold)}
    missing = [cid for cid in order if cid not in ctx or cid not in noctx or cid not in gold_by_id]
    if missing:
        raise ConfigurationError(f"{len(missing)} comments missing from inputs: {missing[:3]}...")
    analysis = evalreport.error_analysis(
        [ctx[cid] for cid in order],
        [noctx[cid] for cid in order],
        [gold_by_id[cid] for cid in order],
        texts,
    )
    evalreport.write_error_analysis_jsonl(args.out, analysis)
    print(json.dumps(analysis["counts"], indent=2, sort_keys=True))
    return 0


def cmd_cooccurrence(args) -> int:
    gold = load_gold(args.gold)
    article_ids = None
    if args.level == "article":
        article_of = {c.comment_id: c.article_id for c in corpus.read_comments(args.comments)}
        article_ids = [article_of[g.comment_id] for g in gold]
    matrix, labels = evalreport.cooccurrence(gold, args.level, article_ids)
    out = args.out or (run_root(args) / f"cooccurrence_{args.level}.csv")
    evalreport.write_cooccurrence_csv(out, matrix, labels)
    logger.info("cooccurrence (%s level): %d pair counts", args.level, int(matrix.sum()) // 2)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=64, help="encoder hidden size")
    p.add_argument("--layers", type=int, default=2, help="encoder layers")
    p.add_argument("--heads", type=int, default=4, help="attention heads")
    p.add_argument("--ffn-dim", type=int, default=128, help="feed-forward size")
    p.add_argument("--vocab-size", type=int, default=8000, help="tokenizer vocabulary size")


def _add_train_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gold", required=True, help="gold.jsonl")
    p.add_argument("--comments", required=True, help="comments.jsonl")
    p.add_argument("--articles", required=True, help="articles.jsonl")
    p.add_argument("--task", choices=["binary", "fine_grained"], required=True)
    p.add_argument("--mode", choices=[m.key for m in ContextMode], required=True)
    p.add_argument("--encoder", help="directory of a domain-adapted encoder")
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--peak-lr", type=float, default=5e-5)
    p.add_argument("--weight-decay", type=float, default=0.1)
    p.add_argument("--warmup-fraction", type=float, default=0.10)
    p.add_argument("--threshold", type=float, default=0.5,
                   help="decision threshold on the sigmoid outputs")
    p.add_argument("--split-seed", type=int, default=0)
    p.add_argument("--test-fraction", type=float, default=0.2)
    p.add_argument("--dev-fraction", type=float, default=0.2)
    p.add_argument("--run-dir", help="artifact root (or CTXHS_RUN_DIR)")
    _add_model_flags(p)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxhs",
        description="contextualized hate speech pipeline: corpus, annotation, training, reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="filter raw articles/comments to the working corpus")
    p.add_argument("--articles", required=True)
    p.add_argument("--comments", required=True)
    p.add_argument("--keywords", help="topic keyword file (default: vendored list)")
    p.add_argument("--out-dir", default="ingested")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("sample", help="select articles by marked comments and sample replies")
    p.add_argument("--articles", required=True)
    p.add_argument("--comments", required=True)
    p.add_argument("--lexicon", help="seed lexicon TSV (default: vendored list)")
    p.add_argument("--seed", "--rng-seed", dest="seed", type=int, default=0)
    p.add_argument("--per-article", "--comments-per-article", dest="per_article",
                   type=int, default=50)
    p.add_argument("--min-marked", "--min-marked-comments", dest="min_marked",
                   type=int, default=2)
    p.add_argument("--out-dir", default="sampled")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("serve", help="run the annotation HTTP API")
    p.add_argument("--articles", required=True)
    p.add_argument("--sampled", required=True, help="sampled.jsonl from the sample step")
    p.add_argument("--pool", required=True, help="comma-separated annotator ids (>= 3)")
    p.add_argument("--log", default="records.log", help="append-only event log")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("gold", help="aggregate annotation records into gold labels")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lenient", action="store_true",
                   help="skip under-annotated comments instead of failing")
    p.set_defaults(func=cmd_gold)

    p = sub.add_parser("agreement", help="inter-annotator agreement report")
    p.add_argument("--records", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("stats", help="corpus statistics report")
    p.add_argument("--gold", required=True)
    p.add_argument("--records")
    p.add_argument("--comments")
    p.add_argument("--articles")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("adapt", help="continue masked-LM pretraining on in-domain text")
    p.add_argument("--corpus", required=True,
                   help="jsonl with text_a/text_b pairs shaped like the mode")
    p.add_argument("--mode", choices=[m.key for m in ContextMode], required=True)
    p.add_argument("--steps", type=int, default=10000)
    p.add_argument("--batch-size", type=int, default=2048)
    p.add_argument("--peak-lr", type=float, default=4e-4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir")
    p.add_argument("--run-dir")
    _add_model_flags(p)
    p.set_defaults(func=cmd_adapt)

    p = sub.add_parser("train", help="fine-tune one classifier run")
    _add_train_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="train several seeds and aggregate test metrics")
    _add_train_flags(p)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="first seed of the range")
    p.add_argument("--seeds", help="explicit comma-separated seed list")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="render aggregated metric tables per mode")
    p.add_argument("--task", choices=["binary", "fine_grained"], required=True)
    p.add_argument("--modes", default="none,tweet,full")
    p.add_argument("--run-dir")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("error-analysis", help="bucket test items by context benefit")
    p.add_argument("--predictions-context", required=True)
    p.add_argument("--predictions-no-context", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument("--texts", required=True, help="test_texts.jsonl from a run")
    p.add_argument("--out", default="error_analysis.jsonl")
    p.set_defaults(func=cmd_error_analysis)

    p = sub.add_parser("cooccurrence", help="characteristic co-occurrence matrix")
    p.add_argument("--gold", required=True)
    p.add_argument("--level", choices=["comment", "article"], default="comment")
    p.add_argument("--comments", help="comments.jsonl (required for article level)")
    p.add_argument("--out")
    p.add_argument("--run-dir")
    p.set_defaults(func=cmd_cooccurrence)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ValueError, FileNotFoundError) as err:
        logger.error("%s", err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
