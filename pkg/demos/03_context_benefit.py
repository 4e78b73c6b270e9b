"""Show the value of context with a synthetic interaction task.

Labels depend on a (context topic x comment marker) interaction, so a
classifier that sees only the comment is stuck near chance while one that
also reads the outlet tweet can solve the task. Takes a couple of minutes on
CPU. Run with:

    python demos/03_context_benefit.py
"""

import numpy as np

from ctxhs.classifier import (
    EncoderConfig,
    LabeledExample,
    TextEncoder,
    TrainConfig,
    WordTokenizer,
    build_classifier,
    predict,
    set_all_seeds,
    train,
)
from ctxhs.evalreport import binary_metrics
from ctxhs.types import ContextMode, ModelInput

FILLER_CONTEXT = ["el", "gobierno", "anuncia", "nuevas", "medidas", "para", "todos"]
FILLER_COMMENT = ["esto", "me", "parece", "una", "verguenza", "total", "che"]

rng = np.random.default_rng(0)
rows = []
for _ in range(3000):
    topic = ["economia", "deportes"][int(rng.integers(2))]
    marker = ["basta", "genial"][int(rng.integers(2))]
    label = int((topic == "economia") == (marker == "basta"))
    context = " ".join(rng.choice(FILLER_CONTEXT, 4)) + f" {topic}"
    comment = f"{marker} " + " ".join(rng.choice(FILLER_COMMENT, 4))
    rows.append((context, comment, label))
train_rows, dev_rows, test_rows = rows[:2000], rows[2000:2500], rows[2500:]


def run(mode: ContextMode) -> float:
    def examples(split):
        return [
            LabeledExample(
                ModelInput(ctx if mode is ContextMode.TWEET else "", com, mode), [label]
            )
            for ctx, com, label in split
        ]

    train_set, dev_set, test_set = map(examples, (train_rows, dev_rows, test_rows))
    tokenizer = WordTokenizer.build(
        [e.minput.text_a for e in train_set] + [e.minput.text_b for e in train_set], 500
    )
    set_all_seeds(0)
    encoder = TextEncoder(
        EncoderConfig(vocab_size=tokenizer.vocab_size, dim=48, layers=2, heads=4,
                      ffn_dim=96, max_len=64)
    )
    model = build_classifier(encoder, "binary")
    train(model, tokenizer, train_set, dev_set,
          TrainConfig(peak_lr=5e-3, batch_size=32, epochs=4, seed=0))
    preds = predict(model, tokenizer, [e.minput for e in test_set])
    metrics = binary_metrics([p.labels[0] for p in preds],
                             [e.labels[0] for e in test_set], quiet=True)
    return metrics.macro_f1


print("training the comment-only model ...")
none_f1 = run(ContextMode.NONE)
print(f"  Macro F1 without context: {none_f1:.1f}")

print("training the comment+tweet model ...")
tweet_f1 = run(ContextMode.TWEET)
print(f"  Macro F1 with tweet context: {tweet_f1:.1f}")

print(f"\ncontext benefit: +{tweet_f1 - none_f1:.1f} Macro F1 points")
