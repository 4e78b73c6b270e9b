"""Fine-tuning loop: linear warmup/decay schedule, per-epoch dev selection,
checkpoint save/load, and batch prediction.

One run directory per (task, context mode, seed) holds the best weights, a
config snapshot, the vocabulary, and the epoch history.
"""

from __future__ import annotations

import copy
import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from ..types import ContextMode, ModelInput
from .model import EncoderConfig, SequenceClassifier, TextEncoder
from .tokenizer import WordTokenizer


@dataclass
class TrainConfig:
    peak_lr: float = 5e-5
    weight_decay: float = 0.1
    warmup_fraction: float = 0.10
    batch_size: int = 32
    epochs: int = 5
    selection_metric: str = "dev_f1"
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.warmup_fraction < 1.0:
            raise ValueError("warmup_fraction must be in (0, 1)")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class LabeledExample:
    minput: ModelInput
    labels: list[int]


@dataclass
class Prediction:
    probs: list[float]
    labels: list[int]


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)
    best_epoch: int = 0
    best_dev_f1: float = 0.0


def set_all_seeds(seed: int) -> None:
    random.seed(seed)
    np.random.seed(seed)
    torch.manual_seed(seed)


def threshold_labels(probs: Sequence[float], threshold: float = 0.5) -> list[int]:
    """Deterministic decision rule; the threshold itself counts as positive."""
    return [int(p >= threshold) for p in probs]


def learning_rate(step: int, total_steps: int, peak_lr: float, warmup_fraction: float) -> float:
    """Linear ramp to ``peak_lr`` over the first ``warmup_fraction`` of steps,
    then linear decay to zero. ``step`` counts completed steps (0-based)."""
    warmup = max(1, int(round(warmup_fraction * total_steps)))
    if step <= warmup:
        return peak_lr * step / warmup
    if total_steps <= warmup:
        return peak_lr
    return peak_lr * max(0, total_steps - step) / (total_steps - warmup)


def encode_examples(
    tokenizer: WordTokenizer, examples: Sequence[LabeledExample]
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Pad a list of examples into (ids, segments, labels) tensors."""
    if not examples:
        raise ValueError("empty example list")
    max_tokens = examples[0].minput.mode.max_tokens
    encoded = [
        tokenizer.encode_pair(ex.minput.text_a, ex.minput.text_b, max_len=max_tokens)
        for ex in examples
    ]
    width = max(len(ids) for ids, _ in encoded)
    ids = torch.zeros(len(encoded), width, dtype=torch.long)
    segments = torch.zeros(len(encoded), width, dtype=torch.long)
    for i, (row_ids, row_segments) in enumerate(encoded):
        ids[i, : len(row_ids)] = torch.tensor(row_ids)
        segments[i, : len(row_segments)] = torch.tensor(row_segments)
    labels = torch.tensor([ex.labels for ex in examples], dtype=torch.float32)
    return ids, segments, labels


def _check_single_mode(examples: Sequence[LabeledExample]) -> ContextMode:
    modes = {ex.minput.mode for ex in examples}
    if len(modes) != 1:
        raise ValueError(f"examples mix context modes: {sorted(m.key for m in modes)}")
    return modes.pop()


def _selection_f1(
    model: SequenceClassifier,
    tokenizer: WordTokenizer,
    dev_set: Sequence[LabeledExample],
    batch_size: int,
) -> float:
    from .. import evalreport  # local import, evalreport has no torch dependency

    preds = predict(model, tokenizer, [ex.minput for ex in dev_set], batch_size=batch_size)
    if model.task == "binary":
        golds = [ex.labels[0] for ex in dev_set]
        metrics = evalreport.binary_metrics([p.labels[0] for p in preds], golds, quiet=True)
        return metrics.per_label["hateful"]["f1"]
    golds = [ex.labels for ex in dev_set]
    metrics = evalreport.finegrained_metrics([p.labels for p in preds], golds, quiet=True)
    return metrics.macro_f1


def train(
    model: SequenceClassifier,
    tokenizer: WordTokenizer,
    train_set: Sequence[LabeledExample],
    dev_set: Sequence[LabeledExample],
    cfg: TrainConfig,
) -> TrainResult:
    """Fine-tune and keep the epoch with the best dev F1 (earlier epoch wins ties).

    The batch loss is the mean over examples of the per-example loss; for the
    fine-grained task the per-example loss is the sum over the nine outputs.
    """
    if not train_set:
        raise ValueError("empty training set")
    if not dev_set:
        raise ValueError("empty dev set")
    mode = _check_single_mode(list(train_set) + list(dev_set))
    if getattr(model, "context_mode", None) is None:
        model.context_mode = mode
    elif model.context_mode is not mode:
        raise ValueError(f"model is bound to mode {model.context_mode.key}, data is {mode.key}")

    set_all_seeds(cfg.seed)
    steps_per_epoch = (len(train_set) + cfg.batch_size - 1) // cfg.batch_size
    total_steps = steps_per_epoch * cfg.epochs
    optimizer = torch.optim.AdamW(
        model.parameters(), lr=cfg.peak_lr, weight_decay=cfg.weight_decay
    )
    loss_fn = nn.BCEWithLogitsLoss(reduction="none")
    rng = np.random.default_rng(cfg.seed)

    result = TrainResult()
    best_state = None
    step = 0
    for epoch in range(1, cfg.epochs + 1):
        model.train()
        order = rng.permutation(len(train_set))
        epoch_losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = [train_set[i] for i in order[start : start + cfg.batch_size]]
            ids, segments, labels = encode_examples(tokenizer, batch)
            lr = learning_rate(step, total_steps, cfg.peak_lr, cfg.warmup_fraction)
            for group in optimizer.param_groups:
                group["lr"] = lr
            optimizer.zero_grad()
            logits = model(ids, segments)
            loss = loss_fn(logits, labels).sum(dim=1).mean()
            if not torch.isfinite(loss):
                raise RuntimeError(
                    f"non-finite loss {loss.item()} at step {step} (epoch {epoch}); "
                    "check the learning rate and the input encoding"
                )
            loss.backward()
            optimizer.step()
            epoch_losses.append(loss.item())
            step += 1

        dev_f1 = _selection_f1(model, tokenizer, dev_set, cfg.batch_size)
        result.history.append(
            {
                "epoch": epoch,
                "train_loss": float(np.mean(epoch_losses)),
                "dev_f1": float(dev_f1),
            }
        )
        if best_state is None or dev_f1 > result.best_dev_f1:
            result.best_dev_f1 = float(dev_f1)
            result.best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())

    model.load_state_dict(best_state)
    model.eval()
    return result


@torch.no_grad()
def predict(
    model: SequenceClassifier,
    tokenizer: WordTokenizer,
    inputs: Sequence[ModelInput],
    batch_size: int = 64,
    threshold: float = 0.5,
) -> list[Prediction]:
    """Probabilities and thresholded labels, in input order. ``threshold`` is
    inclusive: a probability exactly at it yields label 1."""
    if not inputs:
        return []
    mode = {m.mode for m in inputs}
    bound = getattr(model, "context_mode", None)
    if bound is not None and mode != {bound}:
        raise ValueError(
            f"model expects {bound.key} inputs, got {sorted(m.key for m in mode)}"
        )
    model.eval()
    out: list[Prediction] = []
    dummy = [0] * model.num_outputs
    for start in range(0, len(inputs), batch_size):
        chunk = [LabeledExample(m, dummy) for m in inputs[start : start + batch_size]]
        ids, segments, _ = encode_examples(tokenizer, chunk)
        probs = torch.sigmoid(model(ids, segments))
        for row in probs:
            p = [float(x) for x in row]
            out.append(Prediction(probs=p, labels=threshold_labels(p, threshold)))
    return out


# ---------------------------------------------------------------------------
# Checkpoints: runs/<task>/<mode>/<seed>/
# ---------------------------------------------------------------------------


def run_dir(root: str | Path, task: str, mode: ContextMode, seed: int) -> Path:
    return Path(root) / task / mode.key / str(seed)


def save_checkpoint(
    directory: str | Path,
    model: SequenceClassifier,
    tokenizer: WordTokenizer,
    train_cfg: TrainConfig,
    result: TrainResult,
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), directory / "weights.pt")
    tokenizer.save(directory / "vocab.json")
    config = {
        "task": model.task,
        "mode": model.context_mode.key,
        "encoder": model.encoder.cfg.to_dict(),
        "train": train_cfg.to_dict(),
    }
    (directory / "config.json").write_text(
        json.dumps(config, indent=2, sort_keys=True), encoding="utf-8"
    )
    history = {
        "epochs": result.history,
        "best_epoch": result.best_epoch,
        "best_dev_f1": result.best_dev_f1,
    }
    (directory / "history.json").write_text(
        json.dumps(history, indent=2, sort_keys=True), encoding="utf-8"
    )
    return directory


def load_checkpoint(directory: str | Path) -> tuple[SequenceClassifier, WordTokenizer, dict]:
    directory = Path(directory)
    config = json.loads((directory / "config.json").read_text(encoding="utf-8"))
    tokenizer = WordTokenizer.load(directory / "vocab.json")
    encoder = TextEncoder(EncoderConfig(**config["encoder"]))
    model = SequenceClassifier(encoder, config["task"])
    model.load_state_dict(torch.load(directory / "weights.pt", weights_only=True))
    model.eval()
    model.context_mode = ContextMode.from_key(config["mode"])
    return model, tokenizer, config
