"""Word-level tokenizer with a frequency-built vocabulary.

Encodes (context, comment) pairs the BERT way: ``[CLS] a [SEP] b [SEP]`` with
segment ids 0/1, or ``[CLS] b [SEP]`` when the context is empty. Lengths
reported by :meth:`pair_length` include the special tokens, which is what the
truncation budget check needs.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from pathlib import Path
from typing import Iterable, Optional

PAD, UNK, CLS, SEP, MASK = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"
SPECIALS = [PAD, UNK, CLS, SEP, MASK]

TOKEN_RE = re.compile(r"\w+|[^\w\s]", re.UNICODE)


class WordTokenizer:
    def __init__(self, vocab: dict[str, int]):
        for i, tok in enumerate(SPECIALS):
            if vocab.get(tok) != i:
                raise ValueError(f"vocab must map {tok} to {i}")
        self.vocab = vocab
        self.inverse = {i: t for t, i in vocab.items()}

    @property
    def pad_id(self) -> int:
        return self.vocab[PAD]

    @property
    def mask_id(self) -> int:
        return self.vocab[MASK]

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    @classmethod
    def build(
        cls, texts: Iterable[str], vocab_size: int = 8000, min_count: int = 1
    ) -> "WordTokenizer":
        counts: Counter[str] = Counter()
        for text in texts:
            counts.update(cls.tokenize(text))
        vocab = {tok: i for i, tok in enumerate(SPECIALS)}
        # most frequent first, ties alphabetical for reproducibility
        for tok, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            if len(vocab) >= vocab_size:
                break
            if n >= min_count and tok not in vocab:
                vocab[tok] = len(vocab)
        return cls(vocab)

    @staticmethod
    def tokenize(text: str) -> list[str]:
        return TOKEN_RE.findall(text.lower())

    def _ids(self, text: str) -> list[int]:
        unk = self.vocab[UNK]
        return [self.vocab.get(tok, unk) for tok in self.tokenize(text)]

    def encode_pair(
        self, text_a: str, text_b: str, max_len: Optional[int] = None
    ) -> tuple[list[int], list[int]]:
        """Token ids and segment ids for a pair; hard-cut at ``max_len`` if given."""
        cls_id, sep_id = self.vocab[CLS], self.vocab[SEP]
        if text_a:
            ids = [cls_id] + self._ids(text_a) + [sep_id]
            segments = [0] * len(ids)
            b_ids = self._ids(text_b) + [sep_id]
            ids += b_ids
            segments += [1] * len(b_ids)
        else:
            ids = [cls_id] + self._ids(text_b) + [sep_id]
            segments = [0] * len(ids)
        if max_len is not None and len(ids) > max_len:
            ids, segments = ids[:max_len], segments[:max_len]
        return ids, segments

    def pair_length(self, text_a: str, text_b: str) -> int:
        """Encoded pair length including special tokens."""
        return len(self.encode_pair(text_a, text_b)[0])

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.vocab, fh, ensure_ascii=False)

    @classmethod
    def load(cls, path: str | Path) -> "WordTokenizer":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh))
