"""Dataset splitting, classification metrics, multi-run aggregation, error
analysis between context regimes, and characteristic co-occurrence counts.

All metric values are percentage points in [0, 100]. Aggregation over runs
reports the arithmetic mean and the sample (n-1) standard deviation.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .types import Characteristic, GoldLabel, LABEL_ORDER, NUM_LABELS

logger = logging.getLogger(__name__)

CHARACTERISTIC_ORDER = [c.value for c in Characteristic]
BINARY_CLASSES = ["hateful", "non_hateful"]


@dataclass
class SplitSpec:
    train: list[str]
    dev: list[str]
    test: list[str]
    test_articles: list[str]
    traindev_articles: list[str]

    def to_dict(self) -> dict:
        return {
            "train": self.train,
            "dev": self.dev,
            "test": self.test,
            "test_articles": self.test_articles,
            "traindev_articles": self.traindev_articles,
        }


@dataclass
class RunMetrics:
    per_label: dict[str, dict[str, float]]
    macro_precision: float
    macro_recall: float
    macro_f1: float
    seed: Optional[int] = None

    def flat(self) -> dict[str, float]:
        out = {}
        for label, metrics in self.per_label.items():
            for name, value in metrics.items():
                out[f"{label}.{name}"] = value
        out["macro_precision"] = self.macro_precision
        out["macro_recall"] = self.macro_recall
        out["macro_f1"] = self.macro_f1
        return out


def split_dataset(
    comments: Sequence[tuple[str, str]],
    test_fraction: float = 0.2,
    dev_fraction: float = 0.2,
    seed: int = 0,
) -> SplitSpec:
    """Partition (comment_id, article_id) pairs into train/dev/test.

    Articles are partitioned first: whole articles go to the test side until
    its comment count reaches the target, so no test article leaks into
    train or dev. Train and dev then share the remaining article pool but
    split at the comment level.
    """
    if not comments:
        raise ValueError("empty corpus")
    if test_fraction < 0 or dev_fraction < 0 or test_fraction + dev_fraction >= 1:
        raise ValueError("fractions must be >= 0 and sum below 1")

    by_article: dict[str, list[str]] = defaultdict(list)
    for comment_id, article_id in comments:
        by_article[article_id].append(comment_id)
    articles = sorted(by_article)
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(articles))

    total = len(comments)
    target_test = round(test_fraction * total)
    test_articles: list[str] = []
    test: list[str] = []
    cursor = 0
    while len(test) < target_test and cursor < len(order):
        article = articles[order[cursor]]
        test_articles.append(article)
        test.extend(by_article[article])
        cursor += 1
    traindev_articles = [articles[order[i]] for i in range(cursor, len(order))]
    if not traindev_articles:
        raise ValueError("test target consumes every article; nothing left to train on")

    pool = [cid for article in traindev_articles for cid in by_article[article]]
    pool_order = rng.permutation(len(pool))
    target_dev = round(dev_fraction * total)
    if target_dev >= len(pool):
        raise ValueError("dev target consumes the whole train pool")
    dev = [pool[i] for i in pool_order[:target_dev]]
    train = [pool[i] for i in pool_order[target_dev:]]
    return SplitSpec(
        train=train,
        dev=dev,
        test=test,
        test_articles=test_articles,
        traindev_articles=traindev_articles,
    )


def _prf(tp: int, fp: int, fn: int, label: str, quiet: bool) -> dict[str, float]:
    if tp + fp == 0:
        if not quiet:
            logger.warning("label %s: no predicted positives, precision set to 0", label)
        precision = 0.0
    else:
        precision = 100.0 * tp / (tp + fp)
    if tp + fn == 0:
        if not quiet:
            logger.warning("label %s: no gold positives, recall set to 0", label)
        recall = 0.0
    else:
        recall = 100.0 * tp / (tp + fn)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {"precision": precision, "recall": recall, "f1": f1}


def binary_metrics(
    preds: Sequence[int], golds: Sequence[int], seed: Optional[int] = None, quiet: bool = False
) -> RunMetrics:
    """Hateful-class precision/recall/F1 plus the macro average over both classes."""
    if len(preds) != len(golds):
        raise ValueError("predictions and gold labels differ in length")
    per_label = {}
    for cls_name, positive in zip(BINARY_CLASSES, (1, 0)):
        tp = sum(1 for p, g in zip(preds, golds) if p == positive and g == positive)
        fp = sum(1 for p, g in zip(preds, golds) if p == positive and g != positive)
        fn = sum(1 for p, g in zip(preds, golds) if p != positive and g == positive)
        per_label[cls_name] = _prf(tp, fp, fn, cls_name, quiet)
    return RunMetrics(
        per_label=per_label,
        macro_precision=float(np.mean([m["precision"] for m in per_label.values()])),
        macro_recall=float(np.mean([m["recall"] for m in per_label.values()])),
        macro_f1=float(np.mean([m["f1"] for m in per_label.values()])),
        seed=seed,
    )


def finegrained_metrics(
    preds: Sequence[Sequence[int]],
    golds: Sequence[Sequence[int]],
    seed: Optional[int] = None,
    quiet: bool = False,
) -> RunMetrics:
    """Per-label positive-class metrics and unweighted macro averages over the
    nine output labels."""
    if len(preds) != len(golds):
        raise ValueError("predictions and gold labels differ in length")
    for row in list(preds) + list(golds):
        if len(row) != NUM_LABELS:
            raise ValueError(f"label vectors must have dimension {NUM_LABELS}")
    per_label = {}
    for i, label in enumerate(LABEL_ORDER):
        tp = sum(1 for p, g in zip(preds, golds) if p[i] == 1 and g[i] == 1)
        fp = sum(1 for p, g in zip(preds, golds) if p[i] == 1 and g[i] == 0)
        fn = sum(1 for p, g in zip(preds, golds) if p[i] == 0 and g[i] == 1)
        if tp + fp + fn == 0 and not quiet:
            logger.warning("label %s absent from gold and predictions; F1 set to 0", label)
        per_label[label] = _prf(tp, fp, fn, label, quiet)
    return RunMetrics(
        per_label=per_label,
        macro_precision=float(np.mean([m["precision"] for m in per_label.values()])),
        macro_recall=float(np.mean([m["recall"] for m in per_label.values()])),
        macro_f1=float(np.mean([m["f1"] for m in per_label.values()])),
        seed=seed,
    )


def aggregate_runs(runs: Sequence[RunMetrics]) -> dict[str, dict[str, Optional[float]]]:
    """Mean and sample standard deviation per metric over independent runs.

    A single run yields its values with the deviation omitted (None).
    """
    if not runs:
        raise ValueError("no runs to aggregate")
    keys = list(runs[0].flat())
    for run in runs[1:]:
        if list(run.flat()) != keys:
            raise ValueError("runs carry different metric sets")
    out: dict[str, dict[str, Optional[float]]] = {}
    for key in keys:
        values = [run.flat()[key] for run in runs]
        std = float(np.std(values, ddof=1)) if len(values) > 1 else None
        out[key] = {"mean": float(np.mean(values)), "std": std}
    return out


def error_analysis(
    preds_ctx: Sequence[int],
    preds_noctx: Sequence[int],
    golds: Sequence[int],
    texts: Sequence[dict],
) -> dict:
    """Bucket test items by how context changed the binary decision.

    Buckets: missed without context but caught with it; false alarm without
    context fixed by it; hateful comments missed by both. ``texts`` rows give
    at least {comment, context}.
    """
    lengths = {len(preds_ctx), len(preds_noctx), len(golds), len(texts)}
    if len(lengths) != 1:
        raise ValueError("misaligned inputs to error analysis")
    buckets = {
        "fn_without_context_tp_with_context": [],
        "fp_without_context_tn_with_context": [],
        "missed_by_both": [],
    }
    for i, (ctx, noctx, gold) in enumerate(zip(preds_ctx, preds_noctx, golds)):
        item = {"index": i, **texts[i]}
        if gold == 1 and noctx == 0 and ctx == 1:
            buckets["fn_without_context_tp_with_context"].append(item)
        elif gold == 0 and noctx == 1 and ctx == 0:
            buckets["fp_without_context_tn_with_context"].append(item)
        elif gold == 1 and noctx == 0 and ctx == 0:
            buckets["missed_by_both"].append(item)
    return {
        "counts": {name: len(items) for name, items in buckets.items()},
        "items": buckets,
    }


def cooccurrence(
    golds: Sequence[GoldLabel],
    level: str = "comment",
    article_ids: Optional[Sequence[str]] = None,
) -> tuple[np.ndarray, list[str]]:
    """8x8 symmetric pair counts of attacked characteristics, zero diagonal.

    Comment level counts pairs inside one comment's characteristic set;
    article level counts pairs across the union of an article's hateful
    comments (``article_ids`` aligned with ``golds``).
    """
    index = {name: i for i, name in enumerate(CHARACTERISTIC_ORDER)}
    matrix = np.zeros((len(index), len(index)), dtype=int)

    def add_pairs(chars: set[str]) -> None:
        names = sorted(chars)
        for i, a in enumerate(names):
            for b in names[i + 1 :]:
                matrix[index[a]][index[b]] += 1
                matrix[index[b]][index[a]] += 1

    if level == "comment":
        for g in golds:
            if g.hateful:
                add_pairs({c.value for c in g.characteristics})
    elif level == "article":
        if article_ids is None or len(article_ids) != len(golds):
            raise ValueError("article level needs article_ids aligned with golds")
        union: dict[str, set[str]] = defaultdict(set)
        for g, article in zip(golds, article_ids):
            if g.hateful:
                union[article] |= {c.value for c in g.characteristics}
        for chars in union.values():
            add_pairs(chars)
    else:
        raise ValueError(f"unknown level {level!r}")
    return matrix, list(CHARACTERISTIC_ORDER)


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------


def _fmt(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.6f}"


def write_metrics_csv(path: str | Path, runs: Sequence[RunMetrics]) -> None:
    if not runs:
        raise ValueError("no runs to write")
    keys = list(runs[0].flat())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed"] + keys)
        for run in runs:
            flat = run.flat()
            writer.writerow([run.seed] + [_fmt(flat[k]) for k in keys])


def read_metrics_csv(path: str | Path) -> list[RunMetrics]:
    """Inverse of :func:`write_metrics_csv`."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    runs = []
    for row in rows:
        per_label: dict[str, dict[str, float]] = defaultdict(dict)
        macros = {}
        for key, raw in row.items():
            if key == "seed":
                continue
            value = float(raw)
            if key.startswith("macro_"):
                macros[key] = value
            else:
                label, metric = key.rsplit(".", 1)
                per_label[label][metric] = value
        runs.append(
            RunMetrics(
                per_label=dict(per_label),
                macro_precision=macros["macro_precision"],
                macro_recall=macros["macro_recall"],
                macro_f1=macros["macro_f1"],
                seed=int(row["seed"]) if row.get("seed") else None,
            )
        )
    return runs


def write_aggregate_csv(path: str | Path, aggregate: dict[str, dict[str, Optional[float]]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "mean", "std"])
        for key, stats in aggregate.items():
            writer.writerow([key, _fmt(stats["mean"]), _fmt(stats["std"])])


def write_error_analysis_jsonl(path: str | Path, analysis: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for bucket, items in analysis["items"].items():
            for item in items:
                fh.write(
                    json.dumps({"bucket": bucket, **item}, ensure_ascii=False, sort_keys=True)
                    + "\n"
                )


def write_cooccurrence_csv(path: str | Path, matrix: np.ndarray, labels: list[str]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + labels)
        for label, row in zip(labels, matrix):
            writer.writerow([label] + [int(x) for x in row])


def render_aggregate_table(
    aggregates: dict[str, dict[str, dict[str, Optional[float]]]],
    metrics: Optional[list[str]] = None,
) -> str:
    """Text table: one row per metric, one column per context mode."""
    modes = list(aggregates)
    if metrics is None:
        metrics = list(next(iter(aggregates.values())))
    width = max(len(m) for m in metrics) + 2
    header = " " * width + "".join(f"{m:>18}" for m in modes)
    lines = [header]
    for metric in metrics:
        cells = []
        for mode in modes:
            stats = aggregates[mode].get(metric)
            if stats is None:
                cells.append(f"{'-':>18}")
            elif stats["std"] is None:
                cells.append(f"{stats['mean']:>18.1f}")
            else:
                cells.append(f"{stats['mean']:>12.1f} ± {stats['std']:.1f}")
        lines.append(f"{metric:<{width}}" + "".join(cells))
    return "\n".join(lines)
