"""Shared domain types: corpus records, annotation records, labels and configs."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional


class Characteristic(enum.Enum):
    """Protected characteristics a hateful comment can attack."""

    WOMEN = "WOMEN"
    LGBTI = "LGBTI"
    RACISM = "RACISM"
    CLASS = "CLASS"
    POLITICS = "POLITICS"
    APPEARANCE = "APPEARANCE"
    CRIMINAL = "CRIMINAL"
    DISABLED = "DISABLED"


# Fixed order of the fine-grained label vector (exports, classifier heads, reports).
LABEL_ORDER = [
    "CALLS",
    "WOMEN",
    "LGBTI",
    "RACISM",
    "CLASS",
    "POLITICS",
    "DISABLED",
    "APPEARANCE",
    "CRIMINAL",
]
NUM_LABELS = len(LABEL_ORDER)


class ConfigurationError(ValueError):
    """Bad or inconsistent configuration (empty keyword list, missing files, ...)."""


@dataclass
class Article:
    """A news item: the outlet's tweet plus the linked article body."""

    article_id: str
    outlet: str
    tweet_text: str
    body: str
    url: str = ""
    published_at: str = ""

    def to_dict(self) -> dict:
        return {
            "article_id": self.article_id,
            "outlet": self.outlet,
            "tweet_text": self.tweet_text,
            "body": self.body,
            "url": self.url,
            "published_at": self.published_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Article":
        return cls(
            article_id=str(d["article_id"]),
            outlet=d.get("outlet", ""),
            tweet_text=d.get("tweet_text", ""),
            body=d.get("body", ""),
            url=d.get("url", ""),
            published_at=str(d.get("published_at", "")),
        )


@dataclass
class Comment:
    """A user reply under an article; the unit that gets annotated and classified."""

    comment_id: str
    article_id: str
    text: str
    author_id: str = ""
    has_media: bool = False
    has_url: bool = False
    reply_depth: int = 1

    def to_dict(self) -> dict:
        return {
            "comment_id": self.comment_id,
            "article_id": self.article_id,
            "text": self.text,
            "author_id": self.author_id,
            "has_media": self.has_media,
            "has_url": self.has_url,
            "reply_depth": self.reply_depth,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Comment":
        return cls(
            comment_id=str(d["comment_id"]),
            article_id=str(d["article_id"]),
            text=d.get("text", ""),
            author_id=str(d.get("author_id", "")),
            has_media=bool(d.get("has_media", False)),
            has_url=bool(d.get("has_url", False)),
            reply_depth=int(d.get("reply_depth", 1)),
        )


@dataclass
class LexiconEntry:
    """One seed expression used to mark potentially hateful comments.

    ``expression`` is stored lowercase and accent-folded. In ``inflected`` mode
    each expression token matches any comment token that starts with it (word
    boundary prefix); in ``literal`` mode tokens must match exactly. A match
    only counts when it is immediately followed by one of
    ``required_prepositions`` (if any), and is discarded altogether when any
    ``exclusion_terms`` word occurs in the same comment.
    """

    expression: str
    match_mode: str = "literal"  # "literal" | "inflected"
    exclusion_terms: list[str] = field(default_factory=list)
    required_prepositions: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.match_mode not in ("literal", "inflected"):
            raise ConfigurationError(f"unknown match_mode: {self.match_mode!r}")


@dataclass
class SeedLexicon:
    entries: list[LexiconEntry]

    def __post_init__(self):
        if not self.entries:
            raise ConfigurationError("seed lexicon is empty")


@dataclass
class SamplingConfig:
    """Knobs for article selection and per-article comment sampling."""

    covid_keywords: list[str] = field(default_factory=list)
    min_marked_comments: int = 2
    comments_per_article: int = 50
    rng_seed: int = 0

    def __post_init__(self):
        if self.min_marked_comments < 1:
            raise ConfigurationError("min_marked_comments must be >= 1")
        if self.comments_per_article < 1:
            raise ConfigurationError("comments_per_article must be >= 1")


class ContextMode(enum.Enum):
    """Input regime for the classifier, with its bound sequence budget."""

    NONE = ("none", 128)
    TWEET = ("tweet", 256)
    FULL = ("full", 512)

    def __init__(self, key: str, max_tokens: int):
        self.key = key
        self.max_tokens = max_tokens

    @classmethod
    def from_key(cls, key: str) -> "ContextMode":
        for mode in cls:
            if mode.key == key:
                return mode
        raise ConfigurationError(f"unknown context mode: {key!r}")


@dataclass
class ModelInput:
    """A (context, comment) text pair ready for encoding.

    ``text_a`` is the context (empty for NONE mode) and ``text_b`` the comment;
    the encoder joins them with its separator token.
    """

    text_a: str
    text_b: str
    mode: ContextMode


@dataclass
class AnnotationRecord:
    """One annotator's hierarchical judgment of one comment.

    Non-hateful judgments carry no sub-labels; hateful ones must name at least
    one attacked characteristic and answer the call-to-action question.
    """

    annotator_id: str
    comment_id: str
    hateful: bool
    calls_to_action: Optional[bool] = None
    characteristics: frozenset[Characteristic] = frozenset()
    submitted_at: str = ""

    def validate(self) -> None:
        if not self.hateful:
            if self.calls_to_action is not None:
                raise ValueError("non-hateful record must not answer calls_to_action")
            if self.characteristics:
                raise ValueError("non-hateful record must not carry characteristics")
        else:
            if self.calls_to_action is None:
                raise ValueError("hateful record must answer calls_to_action")
            if not self.characteristics:
                raise ValueError("hateful record must name at least one characteristic")

    def to_dict(self) -> dict:
        return {
            "annotator_id": self.annotator_id,
            "comment_id": self.comment_id,
            "hateful": self.hateful,
            "calls_to_action": self.calls_to_action,
            "characteristics": sorted(c.value for c in self.characteristics),
            "submitted_at": self.submitted_at,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotationRecord":
        return cls(
            annotator_id=str(d["annotator_id"]),
            comment_id=str(d["comment_id"]),
            hateful=bool(d["hateful"]),
            calls_to_action=d.get("calls_to_action"),
            characteristics=frozenset(
                Characteristic(c) for c in d.get("characteristics", [])
            ),
            submitted_at=str(d.get("submitted_at", "")),
        )


class AssignmentPass(enum.Enum):
    FIRST = "FIRST"
    THIRD = "THIRD"


class AssignmentStatus(enum.Enum):
    PENDING = "PENDING"
    DONE = "DONE"
    SKIPPED = "SKIPPED"


@dataclass
class Assignment:
    article_id: str
    annotator_id: str
    pass_: AssignmentPass
    status: AssignmentStatus = AssignmentStatus.PENDING

    def to_dict(self) -> dict:
        return {
            "article_id": self.article_id,
            "annotator_id": self.annotator_id,
            "pass": self.pass_.value,
            "status": self.status.value,
        }


@dataclass
class GoldLabel:
    """Aggregated label for one comment after majority voting."""

    comment_id: str
    hateful: bool
    calls_to_action: bool = False
    characteristics: frozenset[Characteristic] = frozenset()

    def label_vector(self) -> list[int]:
        """Binary vector in the fixed ``LABEL_ORDER``; all-zero when not hateful."""
        bits = {name: 0 for name in LABEL_ORDER}
        if self.hateful:
            bits["CALLS"] = int(self.calls_to_action)
            for c in self.characteristics:
                bits[c.value] = 1
        return [bits[name] for name in LABEL_ORDER]

    def to_dict(self) -> dict:
        return {
            "comment_id": self.comment_id,
            "hateful": self.hateful,
            "calls_to_action": self.calls_to_action,
            "characteristics": sorted(c.value for c in self.characteristics),
            "labels": self.label_vector(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GoldLabel":
        return cls(
            comment_id=str(d["comment_id"]),
            hateful=bool(d["hateful"]),
            calls_to_action=bool(d.get("calls_to_action", False)),
            characteristics=frozenset(
                Characteristic(c) for c in d.get("characteristics", [])
            ),
        )


@dataclass
class AgreementReport:
    alpha_hateful: Optional[float]
    alpha_calls: Optional[float]
    alpha_per_characteristic: dict[str, Optional[float]]

    def to_dict(self) -> dict:
        return {
            "alpha_hateful": self.alpha_hateful,
            "alpha_calls": self.alpha_calls,
            "alpha_per_characteristic": dict(self.alpha_per_characteristic),
        }
