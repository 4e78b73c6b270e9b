"""Glue between the annotated corpus and the classifier: normalize texts,
assemble per-mode (context, comment) pairs, split by article, and fit the
pairs into the mode's token budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .classifier.training import LabeledExample
from .evalreport import SplitSpec, split_dataset
from .normalize import build_model_input, normalize_text, truncate_to_budget
from .types import Article, Comment, ContextMode, GoldLabel


@dataclass
class PreparedDataset:
    train: list[LabeledExample]
    dev: list[LabeledExample]
    test: list[LabeledExample]
    test_ids: list[str]
    test_texts: list[dict] = field(default_factory=list)
    split: Optional[SplitSpec] = None

    def all_examples(self) -> list[LabeledExample]:
        return self.train + self.dev + self.test


def labels_for(gold: GoldLabel, task: str) -> list[int]:
    if task == "binary":
        return [int(gold.hateful)]
    if task == "fine_grained":
        return gold.label_vector()
    raise ValueError(f"unknown task {task!r}")


def prepare_dataset(
    gold: Sequence[GoldLabel],
    comments: Sequence[Comment],
    articles: Sequence[Article],
    mode: ContextMode,
    task: str,
    split_seed: int = 0,
    test_fraction: float = 0.2,
    dev_fraction: float = 0.2,
) -> PreparedDataset:
    """Turn gold labels plus the raw corpus into train/dev/test example lists.

    Articles are normalized once; every gold comment must resolve to a known
    comment (and, outside NONE mode, a known article). The split keeps test
    articles disjoint from the train/dev pool.
    """
    comment_by_id = {c.comment_id: c for c in comments}
    article_by_id = {}
    for a in articles:
        article_by_id[a.article_id] = Article(
            article_id=a.article_id,
            outlet=a.outlet,
            tweet_text=normalize_text(a.tweet_text),
            body=normalize_text(a.body),
            url=a.url,
            published_at=a.published_at,
        )

    examples: dict[str, LabeledExample] = {}
    texts: dict[str, dict] = {}
    pairs = []
    for g in gold:
        comment = comment_by_id.get(g.comment_id)
        if comment is None:
            raise ValueError(f"gold label for unknown comment {g.comment_id}")
        article = article_by_id.get(comment.article_id)
        if article is None and mode is not ContextMode.NONE:
            raise ValueError(f"comment {g.comment_id} references unknown article")
        normalized = Comment(
            comment_id=comment.comment_id,
            article_id=comment.article_id,
            text=normalize_text(comment.text),
        )
        minput = build_model_input(normalized, article, mode)
        examples[g.comment_id] = LabeledExample(minput, labels_for(g, task))
        texts[g.comment_id] = {
            "comment_id": g.comment_id,
            "comment": normalized.text,
            "context": minput.text_a,
        }
        pairs.append((g.comment_id, comment.article_id))

    split = split_dataset(pairs, test_fraction=test_fraction,
                          dev_fraction=dev_fraction, seed=split_seed)
    return PreparedDataset(
        train=[examples[cid] for cid in split.train],
        dev=[examples[cid] for cid in split.dev],
        test=[examples[cid] for cid in split.test],
        test_ids=list(split.test),
        test_texts=[texts[cid] for cid in split.test],
        split=split,
    )


def truncate_examples(
    examples: Sequence[LabeledExample], tokenizer_len: Callable[[str, str], int]
) -> list[LabeledExample]:
    return [
        LabeledExample(truncate_to_budget(ex.minput, tokenizer_len), ex.labels)
        for ex in examples
    ]


def corpus_texts(examples: Sequence[LabeledExample]) -> list[str]:
    """Texts for vocabulary building: every context and comment once."""
    seen = []
    for ex in examples:
        if ex.minput.text_a:
            seen.append(ex.minput.text_a)
        seen.append(ex.minput.text_b)
    return seen
