"""Domain adaptation: continue masked-language-model training of the encoder
on unlabeled in-domain text shaped like the target context mode, before any
fine-tuning. One adapted checkpoint per mode.
"""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from torch import nn

from ..types import ContextMode, ModelInput
from .model import EncoderConfig, MaskedLanguageModel, TextEncoder
from .tokenizer import WordTokenizer
from .training import learning_rate, set_all_seeds

logger = logging.getLogger(__name__)


@dataclass
class AdaptConfig:
    steps: int = 10000
    batch_size: int = 2048
    max_seq_len: int = 128
    beta1: float = 0.9
    beta2: float = 0.98
    epsilon: float = 1e-6
    weight_decay: float = 0.01
    peak_lr: float = 4e-4
    warmup_ratio: float = 0.1
    mask_prob: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.max_seq_len not in (128, 256, 512):
            raise ValueError("max_seq_len must be one of 128, 256, 512")

    def to_dict(self) -> dict:
        return asdict(self)


def mask_tokens(
    ids: torch.Tensor,
    tokenizer: WordTokenizer,
    rng: np.random.Generator,
    mask_prob: float,
) -> tuple[torch.Tensor, torch.Tensor]:
    """BERT-style masking: of the selected positions, 80% become [MASK],
    10% a random token, 10% stay. Returns (corrupted ids, targets with -100
    on unselected positions)."""
    ids = ids.clone()
    targets = torch.full_like(ids, -100)
    selectable = ids > 4  # skip [PAD]/[UNK]/[CLS]/[SEP]/[MASK]
    selection = torch.from_numpy(
        rng.random(tuple(ids.shape)) < mask_prob
    ) & selectable
    targets[selection] = ids[selection]
    roll = torch.from_numpy(rng.random(tuple(ids.shape)))
    mask_here = selection & torch.from_numpy(rng.random(tuple(ids.shape)) < 0.8)
    random_here = selection & ~mask_here & (roll < 0.5)
    ids[mask_here] = tokenizer.mask_id
    if random_here.any():
        ids[random_here] = torch.from_numpy(
            rng.integers(5, tokenizer.vocab_size, size=int(random_here.sum()))
        )
    return ids, targets


def domain_adapt(
    inputs: Sequence[ModelInput],
    tokenizer: WordTokenizer,
    encoder: TextEncoder | EncoderConfig,
    cfg: AdaptConfig,
) -> tuple[TextEncoder, list[float]]:
    """Continue masked-LM training of an encoder on mode-shaped text pairs.

    Pass an existing :class:`TextEncoder` to continue its pretraining, or an
    :class:`EncoderConfig` to start from fresh weights. Returns the adapted
    encoder and the per-step masked-token loss history. The corpus must cover
    at least one batch.
    """
    if len(inputs) == 0:
        raise ValueError("empty adaptation corpus")
    if len(inputs) < cfg.batch_size:
        raise ValueError(
            f"adaptation corpus ({len(inputs)}) is shorter than one batch ({cfg.batch_size})"
        )
    modes = {m.mode for m in inputs}
    if len(modes) != 1:
        raise ValueError("adaptation corpus mixes context modes")
    mode = modes.pop()
    if mode.max_tokens != cfg.max_seq_len:
        raise ValueError(
            f"max_seq_len {cfg.max_seq_len} does not match mode {mode.key} "
            f"({mode.max_tokens})"
        )

    set_all_seeds(cfg.seed)
    if isinstance(encoder, EncoderConfig):
        encoder = TextEncoder(encoder)
    model = MaskedLanguageModel(encoder)
    optimizer = torch.optim.AdamW(
        model.parameters(),
        lr=cfg.peak_lr,
        betas=(cfg.beta1, cfg.beta2),
        eps=cfg.epsilon,
        weight_decay=cfg.weight_decay,
    )
    loss_fn = nn.CrossEntropyLoss(ignore_index=-100)
    rng = np.random.default_rng(cfg.seed)

    encoded = [
        tokenizer.encode_pair(m.text_a, m.text_b, max_len=cfg.max_seq_len)
        for m in inputs
    ]
    losses: list[float] = []
    model.train()
    for step in range(cfg.steps):
        picks = rng.choice(len(encoded), size=cfg.batch_size, replace=False)
        batch = [encoded[i] for i in picks]
        width = max(len(ids) for ids, _ in batch)
        ids = torch.zeros(len(batch), width, dtype=torch.long)
        segments = torch.zeros(len(batch), width, dtype=torch.long)
        for i, (row_ids, row_segments) in enumerate(batch):
            ids[i, : len(row_ids)] = torch.tensor(row_ids)
            segments[i, : len(row_segments)] = torch.tensor(row_segments)
        corrupted, targets = mask_tokens(ids, tokenizer, rng, cfg.mask_prob)
        if (targets != -100).sum() == 0:
            continue  # nothing masked in this batch, try the next
        lr = learning_rate(step, cfg.steps, cfg.peak_lr, cfg.warmup_ratio)
        for group in optimizer.param_groups:
            group["lr"] = lr
        optimizer.zero_grad()
        logits = model(corrupted, segments)
        loss = loss_fn(logits.view(-1, tokenizer.vocab_size), targets.view(-1))
        if not torch.isfinite(loss):
            raise RuntimeError(f"non-finite adaptation loss at step {step}")
        loss.backward()
        optimizer.step()
        losses.append(loss.item())
        if step % 50 == 0:
            logger.info("adapt step %d loss %.4f", step, loss.item())

    encoder.eval()
    return encoder, losses


def save_adapted_encoder(
    directory: str | Path,
    encoder: TextEncoder,
    tokenizer: WordTokenizer,
    cfg: AdaptConfig,
    mode: ContextMode,
    losses: list[float],
) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    torch.save(encoder.state_dict(), directory / "encoder.pt")
    tokenizer.save(directory / "vocab.json")
    meta = {"mode": mode.key, "encoder": encoder.cfg.to_dict(), "adapt": cfg.to_dict()}
    (directory / "config.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True), encoding="utf-8"
    )
    (directory / "loss_history.json").write_text(json.dumps(losses), encoding="utf-8")
    return directory


def load_adapted_encoder(directory: str | Path) -> tuple[TextEncoder, WordTokenizer, dict]:
    directory = Path(directory)
    meta = json.loads((directory / "config.json").read_text(encoding="utf-8"))
    tokenizer = WordTokenizer.load(directory / "vocab.json")
    encoder = TextEncoder(EncoderConfig(**meta["encoder"]))
    encoder.load_state_dict(torch.load(directory / "encoder.pt", weights_only=True))
    encoder.eval()
    return encoder, tokenizer, meta
