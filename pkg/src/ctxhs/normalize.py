"""Tweet text normalization and classifier input assembly.

``normalize_text`` applies, in order: character-run capping, laugh
normalization, handle replacement, emoji naming, and hashtag segmentation.
It is idempotent, so it can run after the corpus anonymization step without
double effects. ``build_model_input`` and ``truncate_to_budget`` turn a
comment plus its article into the (context, comment) pair each context mode
expects, within that mode's token budget.
"""

from __future__ import annotations

import logging
import re
from functools import lru_cache
from pathlib import Path
from typing import Callable, Optional

from .corpus import HANDLE_RE
from .types import Article, Comment, ContextMode, ModelInput

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"

RUN_RE = re.compile(r"(.)\1{3,}", re.DOTALL)
LAUGH_RE = re.compile(
    r"\b[aeiouáéíóú]?(?:j+[aeiouáéíóú]+){2,}j*\b", re.IGNORECASE
)
HASHTAG_RE = re.compile(r"#(\w+)", re.UNICODE)
CAMEL_SPLIT_RE = re.compile(r"(?<=[a-z0-9áéíóúñü])(?=[A-ZÁÉÍÓÚÑÜ])")
MULTISPACE_RE = re.compile(r" {2,}")

# Presentation-only codepoints dropped before emoji lookup.
_EMOJI_JOINERS = {0xFE0E, 0xFE0F, 0x200D} | set(range(0x1F3FB, 0x1F400))


@lru_cache(maxsize=1)
def load_emoji_names(path: Optional[str] = None) -> dict[str, str]:
    """Codepoint-to-name table (TSV, hex codepoint and lowercase name)."""
    p = Path(path) if path else DATA_DIR / "emoji_names.tsv"
    table = {}
    for line in p.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        cp, name = line.split("\t", 1)
        table[chr(int(cp, 16))] = name.strip()
    return table


def _cap_repetitions(text: str) -> str:
    return RUN_RE.sub(lambda m: m.group(1) * 3, text)


def _normalize_laughs(text: str) -> str:
    return LAUGH_RE.sub("jaja", text)


def _name_emojis(text: str) -> str:
    table = load_emoji_names()
    out = []
    for ch in text:
        if ord(ch) in _EMOJI_JOINERS:
            continue
        name = table.get(ch)
        out.append(f" emoji {name} emoji " if name else ch)
    return "".join(out)


def _segment_hashtags(text: str) -> str:
    def repl(m: re.Match) -> str:
        words = CAMEL_SPLIT_RE.sub(" ", m.group(1))
        # padded so the marker never glues onto a preceding "@" or word
        return f" hashtag {words} hashtag "

    return HASHTAG_RE.sub(repl, text)


def normalize_text(text: str) -> str:
    """Normalize one tweet or comment. Total and idempotent on any string."""
    text = _cap_repetitions(text)
    text = _normalize_laughs(text)
    text = HANDLE_RE.sub("@user", text)
    text = _name_emojis(text)
    text = _segment_hashtags(text)
    # hashtag segmentation can expose laugh or handle tokens that were glued
    # to the tag; one more rewrite of those two reaches the fixpoint
    text = _normalize_laughs(text)
    text = HANDLE_RE.sub("@user", text)
    return MULTISPACE_RE.sub(" ", text).strip()


class MissingContextError(ValueError):
    """A context mode promised article text that is absent."""


def build_model_input(
    comment: Comment, article: Optional[Article], mode: ContextMode
) -> ModelInput:
    """Assemble the (context, comment) pair for one context mode.

    Texts are expected to be normalized already. NONE ignores the article;
    TWEET uses the outlet tweet; FULL appends the article body to the tweet
    and requires it to be non-empty.
    """
    if mode is ContextMode.NONE:
        return ModelInput(text_a="", text_b=comment.text, mode=mode)
    if article is None:
        raise MissingContextError(f"mode {mode.key} requires an article")
    if mode is ContextMode.TWEET:
        return ModelInput(text_a=article.tweet_text, text_b=comment.text, mode=mode)
    if not article.body.strip():
        raise MissingContextError(
            f"article {article.article_id} has no body for full context"
        )
    return ModelInput(
        text_a=f"{article.tweet_text} {article.body}".strip(),
        text_b=comment.text,
        mode=mode,
    )


def _max_fitting_prefix(
    words: list[str], fits: Callable[[int], bool]
) -> Optional[int]:
    """Largest k with fits(k), assuming fits is monotone decreasing in k."""
    if not fits(0):
        return None
    lo, hi = 0, len(words)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid - 1
    return lo


def truncate_to_budget(
    minput: ModelInput, tokenizer_len: Callable[[str, str], int]
) -> ModelInput:
    """Shrink an input pair until its encoded length fits the mode budget.

    The context is cut from its end first; the comment is touched only when
    even an empty context leaves the pair over budget (then its tail goes,
    with a warning). ``tokenizer_len(text_a, text_b)`` must count special
    tokens.
    """
    budget = minput.mode.max_tokens
    if tokenizer_len(minput.text_a, minput.text_b) <= budget:
        return minput

    a_words = minput.text_a.split()
    k = _max_fitting_prefix(
        a_words, lambda n: tokenizer_len(" ".join(a_words[:n]), minput.text_b) <= budget
    )
    if k is not None:
        return ModelInput(" ".join(a_words[:k]), minput.text_b, minput.mode)

    b_words = minput.text_b.split()
    k = _max_fitting_prefix(
        b_words, lambda n: tokenizer_len("", " ".join(b_words[:n])) <= budget
    )
    if k is None:
        raise ValueError(f"budget {budget} cannot hold even an empty pair")
    logger.warning(
        "comment truncated to %d of %d words to fit the %d-token budget",
        k,
        len(b_words),
        budget,
    )
    return ModelInput("", " ".join(b_words[:k]), minput.mode)
