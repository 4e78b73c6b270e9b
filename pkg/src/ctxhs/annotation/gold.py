"""Gold label aggregation (majority vote) and corpus-level statistics."""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Iterable, Optional

from ..types import AnnotationRecord, Article, Characteristic, Comment, GoldLabel
from .agreement import agreement_report


class UndecidableGoldError(ValueError):
    """The vote pattern requires a third annotation that is missing."""


def compute_gold_labels(records: list[AnnotationRecord]) -> GoldLabel:
    """Aggregate the 2 or 3 judgments of one comment into its gold label.

    A comment is hateful when at least two annotators marked it so; given
    that, call-to-action needs two votes while a characteristic needs one.
    Non-hateful comments carry no other labels. Two records with a single
    hateful vote are undecidable (the third pass breaks the tie).
    """
    if len(records) < 2:
        raise ValueError(f"need at least 2 records, got {len(records)}")
    comment_ids = {r.comment_id for r in records}
    if len(comment_ids) != 1:
        raise ValueError(f"records span several comments: {sorted(comment_ids)}")
    for r in records:
        r.validate()

    comment_id = records[0].comment_id
    hateful_votes = sum(r.hateful for r in records)
    if len(records) == 2 and hateful_votes == 1:
        raise UndecidableGoldError(
            f"comment {comment_id}: split 2-way vote needs a third annotation"
        )

    if hateful_votes < 2:
        return GoldLabel(comment_id=comment_id, hateful=False)

    calls_votes = sum(1 for r in records if r.hateful and r.calls_to_action)
    characteristics = frozenset().union(*(r.characteristics for r in records))
    return GoldLabel(
        comment_id=comment_id,
        hateful=True,
        calls_to_action=calls_votes >= 2,
        characteristics=characteristics,
    )


def compute_all_gold_labels(
    records: Iterable[AnnotationRecord], strict: bool = True
) -> list[GoldLabel]:
    """Group records by comment and aggregate each group, sorted by comment id.

    With ``strict=False``, undecidable or under-annotated comments are skipped
    instead of raising (useful while annotation is still in flight).
    """
    by_comment: dict[str, list[AnnotationRecord]] = defaultdict(list)
    for r in records:
        by_comment[r.comment_id].append(r)
    gold = []
    for comment_id in sorted(by_comment):
        try:
            gold.append(compute_gold_labels(by_comment[comment_id]))
        except (UndecidableGoldError, ValueError):
            if strict:
                raise
    return gold


def dataset_statistics(
    gold: list[GoldLabel],
    records: Optional[list[AnnotationRecord]] = None,
    comments: Optional[list[Comment]] = None,
    articles: Optional[list[Article]] = None,
) -> dict:
    """Corpus figures: totals, per-characteristic counts and agreement,
    per-outlet counts, and the hateful-comments-per-user distribution.

    ``comments`` supplies the article and author of each gold comment;
    ``articles`` supplies outlets; ``records`` enables the agreement block.
    Missing inputs simply blank the corresponding sections.
    """
    comment_info = {c.comment_id: c for c in (comments or [])}
    outlet_of = {a.article_id: a.outlet for a in (articles or [])}

    hateful_gold = [g for g in gold if g.hateful]
    article_ids = {
        comment_info[g.comment_id].article_id
        for g in gold
        if g.comment_id in comment_info
    }

    per_characteristic = {}
    for c in Characteristic:
        with_c = [g for g in hateful_gold if c in g.characteristics]
        per_characteristic[c.value] = {
            "count": len(with_c),
            "calls_to_action": sum(1 for g in with_c if g.calls_to_action),
        }

    by_outlet_articles: dict[str, set] = defaultdict(set)
    by_outlet_comments: dict[str, int] = defaultdict(int)
    for g in gold:
        info = comment_info.get(g.comment_id)
        if info is None:
            continue
        outlet = outlet_of.get(info.article_id)
        if outlet is None:
            continue
        by_outlet_articles[outlet].add(info.article_id)
        by_outlet_comments[outlet] += 1
    per_outlet = {
        outlet: {
            "articles": len(by_outlet_articles[outlet]),
            "comments": by_outlet_comments[outlet],
        }
        for outlet in sorted(by_outlet_articles)
    }

    hateful_by_user = Counter(
        comment_info[g.comment_id].author_id
        for g in hateful_gold
        if g.comment_id in comment_info
    )
    users = {
        "with_hateful_comments": len(hateful_by_user),
        "mean_hateful_per_user": (
            round(sum(hateful_by_user.values()) / len(hateful_by_user), 4)
            if hateful_by_user
            else 0.0
        ),
        "over_10_hateful": sum(1 for n in hateful_by_user.values() if n > 10),
    }

    agreement = None
    if records:
        agreement = agreement_report(records).to_dict()

    single = sum(1 for g in hateful_gold if len(g.characteristics) == 1)
    multi = sum(1 for g in hateful_gold if len(g.characteristics) >= 2)

    return {
        "totals": {
            "comments": len(gold),
            "articles": len(article_ids),
            "hateful": len(hateful_gold),
            "hateful_single_characteristic": single,
            "hateful_multi_characteristic": multi,
        },
        "per_characteristic": per_characteristic,
        "per_outlet": per_outlet,
        "users": users,
        "agreement": agreement,
    }
