"""Inter-annotator agreement: nominal Krippendorff's alpha with missing data."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from ..types import AgreementReport, AnnotationRecord, Characteristic

MISSING = None


class InsufficientDataError(ValueError):
    """Fewer than two items carry two or more ratings."""


class UndefinedAlphaError(ZeroDivisionError):
    """Expected disagreement is zero (every rating falls in one category)."""


def krippendorff_alpha(
    label_matrix: Sequence[Sequence[object]], level: str = "nominal"
) -> float:
    """Agreement coefficient over an annotators-by-items matrix.

    ``label_matrix[a][i]`` is annotator ``a``'s rating of item ``i``; use
    ``None`` for missing cells. Ratings are treated as nominal categories.
    Computed as 1 - D_obs/D_exp from the coincidence matrix: each item with
    m >= 2 ratings contributes every ordered rating pair with weight
    1/(m - 1); expected disagreement pools the category totals.
    """
    if level != "nominal":
        raise NotImplementedError(f"only nominal alpha is implemented, got {level!r}")

    n_items = max((len(row) for row in label_matrix), default=0)
    columns = []
    for i in range(n_items):
        ratings = [
            row[i] for row in label_matrix if i < len(row) and row[i] is not MISSING
        ]
        if len(ratings) >= 2:
            columns.append(ratings)
    if len(columns) < 2:
        raise InsufficientDataError(
            f"need at least 2 items with 2+ ratings, got {len(columns)}"
        )

    categories: dict[object, int] = {}
    for ratings in columns:
        for val in ratings:
            categories.setdefault(val, len(categories))
    n_cat = len(categories)

    coincidence = np.zeros((n_cat, n_cat))
    for ratings in columns:
        m = len(ratings)
        counts = np.zeros(n_cat)
        for val in ratings:
            counts[categories[val]] += 1
        # ordered pairs within the item: counts_c * counts_k, minus self-pairs
        pair = np.outer(counts, counts) - np.diag(counts)
        coincidence += pair / (m - 1)

    totals = coincidence.sum(axis=1)
    n = totals.sum()
    observed_off = n - np.trace(coincidence)
    expected_off = n * n - (totals**2).sum()
    if expected_off <= 0:
        raise UndefinedAlphaError("all ratings identical; alpha is undefined")
    return float(1.0 - (n - 1) * observed_off / expected_off)


def _safe_alpha(matrix: list[list[object]]) -> Optional[float]:
    try:
        return krippendorff_alpha(matrix)
    except (InsufficientDataError, UndefinedAlphaError):
        return None


def agreement_report(records: list[AnnotationRecord]) -> AgreementReport:
    """Alphas for the hateful flag, the call-to-action flag, and each characteristic.

    A non-hateful judgment counts as "not selected" (0) for the call-to-action
    and characteristic ratings rather than as missing. Degenerate label
    distributions yield ``None`` instead of a value.
    """
    annotators = sorted({r.annotator_id for r in records})
    comments = sorted({r.comment_id for r in records})
    a_idx = {a: i for i, a in enumerate(annotators)}
    c_idx = {c: i for i, c in enumerate(comments)}

    def empty() -> list[list[object]]:
        return [[MISSING] * len(comments) for _ in annotators]

    hateful = empty()
    calls = empty()
    per_char = {c: empty() for c in Characteristic}
    for r in records:
        i, j = a_idx[r.annotator_id], c_idx[r.comment_id]
        hateful[i][j] = int(r.hateful)
        calls[i][j] = int(bool(r.hateful and r.calls_to_action))
        for c in Characteristic:
            per_char[c][i][j] = int(c in r.characteristics)

    return AgreementReport(
        alpha_hateful=_safe_alpha(hateful),
        alpha_calls=_safe_alpha(calls),
        alpha_per_characteristic={
            c.value: _safe_alpha(m) for c, m in per_char.items()
        },
    )
