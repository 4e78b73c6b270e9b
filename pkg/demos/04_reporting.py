"""Tour of the evaluation toolkit: splits, metrics, aggregation over runs,
error-analysis buckets and co-occurrence matrices. Pure numpy, runs in
seconds:

    python demos/04_reporting.py
"""

import numpy as np

from ctxhs.evalreport import (
    aggregate_runs,
    binary_metrics,
    cooccurrence,
    error_analysis,
    finegrained_metrics,
    render_aggregate_table,
    split_dataset,
)
from ctxhs.types import Characteristic, GoldLabel

rng = np.random.default_rng(1)

print("=== article-disjoint splitting ===")
pairs = [(f"a{a}_c{i}", f"a{a}") for a in range(12) for i in range(10)]
spec = split_dataset(pairs, test_fraction=0.2, dev_fraction=0.2, seed=3)
print(f"train {len(spec.train)} / dev {len(spec.dev)} / test {len(spec.test)} comments")
print("test articles:", spec.test_articles, "(never appear in train or dev)")

print("\n=== binary metrics ===")
golds = rng.integers(0, 2, size=200).tolist()
preds = [g if rng.random() < 0.85 else 1 - g for g in golds]
metrics = binary_metrics(preds, golds)
print("hateful class:", {k: round(v, 1) for k, v in metrics.per_label["hateful"].items()})
print("macro F1:", round(metrics.macro_f1, 1))

print("\n=== fine-grained metrics over the 9-label vector ===")
gold_vectors = rng.integers(0, 2, size=(200, 9)).tolist()
pred_vectors = [
    [b if rng.random() < 0.8 else 1 - b for b in row] for row in gold_vectors
]
fine = finegrained_metrics(pred_vectors, gold_vectors, quiet=True)
print("per-label F1:", {k: round(v["f1"], 1) for k, v in fine.per_label.items()})

print("\n=== aggregation over seeds, mean ± std ===")
runs = []
for seed in range(10):
    noisy = [g if rng.random() < 0.84 + 0.02 * rng.random() else 1 - g for g in golds]
    runs.append(binary_metrics(noisy, golds, seed=seed, quiet=True))
table = render_aggregate_table(
    {"demo": aggregate_runs(runs)},
    metrics=["hateful.precision", "hateful.recall", "hateful.f1", "macro_f1"],
)
print(table)

print("\n=== error analysis buckets ===")
ctx_preds = [g if rng.random() < 0.9 else 1 - g for g in golds]
noctx_preds = [g if rng.random() < 0.7 else 1 - g for g in golds]
texts = [{"comment": f"comentario {i}", "context": f"titular {i}"} for i in range(200)]
analysis = error_analysis(ctx_preds, noctx_preds, golds, texts)
print(analysis["counts"])

print("\n=== co-occurrence of attacked characteristics ===")
gold_labels = []
for i in range(300):
    k = int(rng.integers(1, 4))
    chars = rng.choice([c.value for c in Characteristic], size=k, replace=False)
    gold_labels.append(GoldLabel(
        comment_id=f"c{i}", hateful=True,
        characteristics=frozenset(Characteristic(c) for c in chars),
    ))
matrix, labels = cooccurrence(gold_labels, "comment")
print("order:", labels)
print(matrix)
