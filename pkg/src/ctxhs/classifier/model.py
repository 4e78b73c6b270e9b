"""Transformer encoder with sigmoid classification heads and a masked-LM head.

The classifier consumes the final hidden state of the leading [CLS] position
as the sequence summary. The binary task uses a single sigmoid output; the
fine-grained task uses nine independent sigmoid outputs over one shared
encoder, so both variants have exactly the same encoder parameter count.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import torch
from torch import nn

from ..types import NUM_LABELS

TASKS = ("binary", "fine_grained")


@dataclass
class EncoderConfig:
    vocab_size: int
    dim: int = 64
    layers: int = 2
    heads: int = 4
    ffn_dim: int = 128
    max_len: int = 512
    dropout: float = 0.1

    def to_dict(self) -> dict:
        return asdict(self)


class TextEncoder(nn.Module):
    def __init__(self, cfg: EncoderConfig):
        super().__init__()
        self.cfg = cfg
        self.token_embedding = nn.Embedding(cfg.vocab_size, cfg.dim, padding_idx=0)
        self.position_embedding = nn.Embedding(cfg.max_len, cfg.dim)
        self.segment_embedding = nn.Embedding(2, cfg.dim)
        self.norm = nn.LayerNorm(cfg.dim)
        self.dropout = nn.Dropout(cfg.dropout)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.dim,
            nhead=cfg.heads,
            dim_feedforward=cfg.ffn_dim,
            dropout=cfg.dropout,
            activation="gelu",
            batch_first=True,
        )
        # nested-tensor fast path off: keeps numerics independent of how a
        # batch happens to be padded
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=cfg.layers, enable_nested_tensor=False
        )

    def forward(self, ids: torch.Tensor, segments: torch.Tensor) -> torch.Tensor:
        """Hidden states, shape (batch, seq, dim). Position 0 is the summary."""
        positions = torch.arange(ids.size(1), device=ids.device).unsqueeze(0)
        x = (
            self.token_embedding(ids)
            + self.position_embedding(positions)
            + self.segment_embedding(segments)
        )
        x = self.dropout(self.norm(x))
        padding_mask = ids.eq(0)
        return self.encoder(x, src_key_padding_mask=padding_mask)


class SequenceClassifier(nn.Module):
    """Encoder plus a sigmoid head; 1 output for binary, 9 for fine-grained."""

    def __init__(self, encoder: TextEncoder, task: str):
        super().__init__()
        if task not in TASKS:
            raise ValueError(f"unknown task {task!r}, expected one of {TASKS}")
        self.encoder = encoder
        self.task = task
        self.num_outputs = 1 if task == "binary" else NUM_LABELS
        self.head = nn.Linear(encoder.cfg.dim, self.num_outputs)

    def forward(self, ids: torch.Tensor, segments: torch.Tensor) -> torch.Tensor:
        """Logits, shape (batch, num_outputs)."""
        hidden = self.encoder(ids, segments)
        return self.head(hidden[:, 0])

    @torch.no_grad()
    def predict_proba(self, ids: torch.Tensor, segments: torch.Tensor) -> torch.Tensor:
        self.eval()
        return torch.sigmoid(self(ids, segments))


class MaskedLanguageModel(nn.Module):
    def __init__(self, encoder: TextEncoder):
        super().__init__()
        self.encoder = encoder
        self.lm_head = nn.Linear(encoder.cfg.dim, encoder.cfg.vocab_size)

    def forward(self, ids: torch.Tensor, segments: torch.Tensor) -> torch.Tensor:
        return self.lm_head(self.encoder(ids, segments))


def build_classifier(encoder: TextEncoder, task: str) -> SequenceClassifier:
    return SequenceClassifier(encoder, task)
