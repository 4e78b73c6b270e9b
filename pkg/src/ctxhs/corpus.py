"""Corpus pipeline: ingest outlet posts and replies, filter to the COVID topic,
pick articles via slur-marked comments, then sample and anonymize comments for
annotation.

Inputs are newline-delimited JSON files (one object per line, UTF-8) with the
field names of :class:`~ctxhs.types.Article` and :class:`~ctxhs.types.Comment`.
All transforms are pure and deterministic for a fixed seed; comment sampling
uses a per-article RNG derived from ``(rng_seed, article_id)`` so processing
order never changes the output.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
import unicodedata
from collections import defaultdict
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .types import (
    Article,
    Comment,
    ConfigurationError,
    LexiconEntry,
    SamplingConfig,
    SeedLexicon,
)

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"

# Platform handle rule: "@" + up to 15 word characters, not glued to a word.
HANDLE_RE = re.compile(r"(?<![A-Za-z0-9_])@[A-Za-z0-9_]{1,15}(?![A-Za-z0-9_])")

WORD_RE = re.compile(r"\w+", re.UNICODE)


def fold(text: str) -> str:
    """Lowercase and strip diacritics, so 'Síntoma' == 'sintoma'."""
    decomposed = unicodedata.normalize("NFKD", text.lower())
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def anonymize(text: str) -> str:
    """Replace every user handle with the literal token ``@user``.

    Idempotent: ``@user`` itself matches the handle grammar and maps to itself.
    """
    return HANDLE_RE.sub("@user", text)


def filter_covid_articles(
    articles: Iterable[Article], keywords: list[str]
) -> Iterator[Article]:
    """Retain articles whose body contains at least one topic keyword.

    Matching is case- and accent-insensitive and anchored at a word boundary;
    the keyword may be a prefix of a longer word so singular keywords also hit
    plural forms.
    """
    if not keywords:
        raise ConfigurationError("keyword list is empty")
    patterns = [
        re.compile(r"\b" + re.escape(fold(k)) + r"\w*", re.UNICODE) for k in keywords
    ]
    for article in articles:
        body = fold(article.body)
        if any(p.search(body) for p in patterns):
            yield article


def keep_first_level_replies(comments: Iterable[Comment]) -> Iterator[Comment]:
    """Drop everything below the first reply level, preserving order."""
    return (c for c in comments if c.reply_depth == 1)


def _tokens(text: str) -> list[str]:
    return WORD_RE.findall(fold(text))


def _entry_matches(tokens: list[str], entry: LexiconEntry) -> bool:
    expr_tokens = entry.expression.split()
    if not expr_tokens:
        return False
    if entry.exclusion_terms:
        exclusions = set(entry.exclusion_terms)
        if any(t in exclusions for t in tokens):
            return False
    n = len(expr_tokens)
    for i in range(len(tokens) - n + 1):
        if entry.match_mode == "inflected":
            ok = all(tokens[i + j].startswith(expr_tokens[j]) for j in range(n))
        else:
            ok = all(tokens[i + j] == expr_tokens[j] for j in range(n))
        if not ok:
            continue
        if entry.required_prepositions:
            if i + n >= len(tokens):
                continue
            if tokens[i + n] not in entry.required_prepositions:
                continue
        return True
    return False


def mark_slur_comments(comments: list[Comment], lexicon: SeedLexicon) -> list[bool]:
    """Flag each comment that matches at least one seed expression.

    Runs on raw (pre-anonymization) text. A flag is set when some entry matches
    under its mode and none of that entry's exclusion words occur in the
    comment.
    """
    flags = []
    for comment in comments:
        tokens = _tokens(comment.text)
        flags.append(any(_entry_matches(tokens, e) for e in lexicon.entries))
    return flags


def select_articles(
    articles: list[Article],
    comments: list[Comment],
    marks: list[bool],
    cfg: SamplingConfig,
) -> list[Article]:
    """Keep articles with at least ``cfg.min_marked_comments`` marked comments.

    ``marks`` must be aligned with ``comments`` (the output of
    :func:`mark_slur_comments`).
    """
    if len(marks) != len(comments):
        raise ValueError("marks and comments are misaligned")
    marked_count: dict[str, int] = defaultdict(int)
    for comment, marked in zip(comments, marks):
        if marked:
            marked_count[comment.article_id] += 1
    return [a for a in articles if marked_count[a.article_id] >= cfg.min_marked_comments]


def _article_rng(rng_seed: int, article_id: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{rng_seed}:{article_id}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def sample_comments_for_annotation(
    article: Article, comments: list[Comment], cfg: SamplingConfig
) -> list[Comment]:
    """Sample up to ``cfg.comments_per_article`` comments of one article.

    Comments with URLs or media are excluded first; the sample is uniform
    without replacement over all remaining comments (not only marked ones) and
    keeps the input order. Deterministic given ``(cfg.rng_seed, article_id)``.
    """
    eligible = [
        c
        for c in comments
        if c.article_id == article.article_id and not c.has_url and not c.has_media
    ]
    if not eligible:
        logger.warning("article %s has no eligible comments", article.article_id)
        return []
    k = min(cfg.comments_per_article, len(eligible))
    rng = _article_rng(cfg.rng_seed, article.article_id)
    idx = rng.choice(len(eligible), size=k, replace=False)
    return [eligible[i] for i in sorted(idx.tolist())]


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                yield json.loads(line)


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, sort_keys=True) + "\n")
            n += 1
    return n


def read_articles(path: str | Path) -> list[Article]:
    return [Article.from_dict(d) for d in read_jsonl(path)]


def read_comments(path: str | Path) -> list[Comment]:
    return [Comment.from_dict(d) for d in read_jsonl(path)]


def load_covid_keywords(path: str | Path | None = None) -> list[str]:
    path = Path(path) if path else DATA_DIR / "covid_keywords.txt"
    keywords = [
        line.strip()
        for line in path.read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    ]
    if not keywords:
        raise ConfigurationError(f"no keywords in {path}")
    return keywords


def load_lexicon(path: str | Path | None = None) -> SeedLexicon:
    """Load a seed lexicon from TSV.

    Columns: expression, match_mode, exclusion_terms, required_prepositions;
    the last two are ``|``-separated and may be empty. Lines starting with
    ``#`` are comments. Expressions are folded at load time.
    """
    path = Path(path) if path else DATA_DIR / "seed_lexicon.tsv"
    entries = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = (line.split("\t") + ["", "", ""])[:4]
        expression, mode, exclusions, preps = parts
        entries.append(
            LexiconEntry(
                expression=fold(expression.strip()),
                match_mode=mode.strip() or "literal",
                exclusion_terms=[fold(t) for t in exclusions.split("|") if t.strip()],
                required_prepositions=[fold(t) for t in preps.split("|") if t.strip()],
            )
        )
    return SeedLexicon(entries=entries)


# ---------------------------------------------------------------------------
# End-to-end sampling
# ---------------------------------------------------------------------------


def run_ingest(
    articles: Iterable[Article],
    comments: Iterable[Comment],
    keywords: list[str],
) -> tuple[list[Article], list[Comment]]:
    """Filter to COVID-related articles with a body and their first-level replies."""
    kept_articles = [
        a for a in filter_covid_articles(articles, keywords) if a.body.strip()
    ]
    kept_ids = {a.article_id for a in kept_articles}
    kept_comments = [
        c for c in keep_first_level_replies(comments) if c.article_id in kept_ids
    ]
    return kept_articles, kept_comments


def run_sampling(
    articles: list[Article],
    comments: list[Comment],
    lexicon: SeedLexicon,
    cfg: SamplingConfig,
) -> tuple[list[dict], dict]:
    """Select articles by marked comments, sample and anonymize their replies.

    Returns the rows of ``sampled.jsonl`` (article_id, comment_id, anonymized
    text) and the ``sampling_report.json`` payload with per-outlet counts.
    """
    marks = mark_slur_comments(comments, lexicon)
    selected = select_articles(articles, comments, marks, cfg)
    selected_ids = {a.article_id for a in selected}

    by_article: dict[str, list[Comment]] = defaultdict(list)
    for c in comments:
        by_article[c.article_id].append(c)

    rows = []
    outlet_articles: dict[str, set] = defaultdict(set)
    outlet_comments: dict[str, int] = defaultdict(int)
    for article in selected:
        sample = sample_comments_for_annotation(article, by_article[article.article_id], cfg)
        if not sample:
            continue
        outlet_articles[article.outlet].add(article.article_id)
        for c in sample:
            rows.append(
                {
                    "article_id": article.article_id,
                    "comment_id": c.comment_id,
                    "text": anonymize(c.text),
                }
            )
            outlet_comments[article.outlet] += 1

    per_outlet = {
        outlet: {
            "articles": len(outlet_articles[outlet]),
            "comments": outlet_comments[outlet],
        }
        for outlet in sorted(outlet_articles)
    }
    report = {
        "per_outlet": per_outlet,
        "total": {
            "articles": sum(v["articles"] for v in per_outlet.values()),
            "comments": sum(v["comments"] for v in per_outlet.values()),
        },
        "config": {
            "min_marked_comments": cfg.min_marked_comments,
            "comments_per_article": cfg.comments_per_article,
            "rng_seed": cfg.rng_seed,
        },
        "selected_articles": len(selected_ids),
    }
    return rows, report
