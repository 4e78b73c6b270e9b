"""Annotation service state: task assignment, judgment persistence, skip flow.

Each article is judged by two annotators; comments any of them marked hateful
get a third, blind pass by someone else. Writes go to an append-only JSONL
log (one event per line) that is replayed on startup; the in-memory dicts are
the materialized views. Submissions to distinct comments are independent;
per-(annotator, comment) writes are last-write-wins; assignment creation and
the skip requeue run under one lock.
"""

from __future__ import annotations

import json
import logging
import threading
from collections import defaultdict
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from ..types import (
    AnnotationRecord,
    Article,
    Assignment,
    AssignmentPass,
    AssignmentStatus,
    Comment,
    GoldLabel,
)
from .agreement import agreement_report
from .gold import compute_all_gold_labels, dataset_statistics

logger = logging.getLogger(__name__)


class AssignmentError(Exception):
    """No active assignment covers the attempted action."""


class AnnotationStore:
    def __init__(self, annotator_pool: list[str], persist_path: str | Path | None = None):
        if len(set(annotator_pool)) != len(annotator_pool):
            raise ValueError("annotator pool has duplicates")
        self.pool = list(annotator_pool)
        self.articles: dict[str, Article] = {}
        self.comments_by_article: dict[str, list[Comment]] = {}
        self.article_order: list[str] = []
        self._comment_article: dict[str, str] = {}
        self.assignments: dict[str, list[Assignment]] = defaultdict(list)
        self.records: dict[tuple[str, str], AnnotationRecord] = {}
        self.unresolvable: set[str] = set()
        self._lock = threading.RLock()
        self._persist_path = Path(persist_path) if persist_path else None
        self._replaying = False

    # -- persistence --------------------------------------------------------

    def _append_event(self, event: dict) -> None:
        if self._persist_path is None or self._replaying:
            return
        with open(self._persist_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")

    def recover(self) -> None:
        """Replay the event log; call after the corpus has been loaded."""
        if self._persist_path is None or not self._persist_path.exists():
            return
        with self._lock:
            self._replaying = True
            try:
                self._replay()
            finally:
                self._replaying = False

    def _replay(self) -> None:
        for line in self._persist_path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            kind = event.pop("event")
            if kind == "assignment":
                self.assignments[event["article_id"]].append(
                    Assignment(
                        article_id=event["article_id"],
                        annotator_id=event["annotator_id"],
                        pass_=AssignmentPass(event["pass"]),
                    )
                )
            elif kind == "annotation":
                record = AnnotationRecord.from_dict(event)
                self.records[(record.annotator_id, record.comment_id)] = record
            elif kind == "skip":
                a = self._find_assignment(event["annotator_id"], event["article_id"])
                if a is not None:
                    a.status = AssignmentStatus.SKIPPED
            elif kind == "unresolvable":
                self.unresolvable.add(event["article_id"])
        self._refresh_done_flags()

    # -- corpus -------------------------------------------------------------

    def add_article(self, article: Article, comments: list[Comment]) -> None:
        with self._lock:
            self.articles[article.article_id] = article
            self.comments_by_article[article.article_id] = list(comments)
            for c in comments:
                self._comment_article[c.comment_id] = article.article_id
            if article.article_id not in self.article_order:
                self.article_order.append(article.article_id)

    # -- assignment ---------------------------------------------------------

    def _first_load(self, annotator_id: str) -> int:
        return sum(
            1
            for assignments in self.assignments.values()
            for a in assignments
            if a.annotator_id == annotator_id
            and a.pass_ is AssignmentPass.FIRST
            and a.status is not AssignmentStatus.SKIPPED
        )

    def _involved(self, article_id: str) -> set[str]:
        return {a.annotator_id for a in self.assignments[article_id]}

    def _active(self, article_id: str, pass_: AssignmentPass) -> list[Assignment]:
        return [
            a
            for a in self.assignments[article_id]
            if a.pass_ is pass_ and a.status is not AssignmentStatus.SKIPPED
        ]

    def _least_loaded(self, candidates: list[str]) -> str:
        return min(sorted(candidates), key=self._first_load)

    def _add_assignment(self, article_id: str, annotator_id: str, pass_: AssignmentPass) -> Assignment:
        assignment = Assignment(article_id=article_id, annotator_id=annotator_id, pass_=pass_)
        self.assignments[article_id].append(assignment)
        self._append_event(
            {
                "event": "assignment",
                "article_id": article_id,
                "annotator_id": annotator_id,
                "pass": pass_.value,
            }
        )
        return assignment

    def create_assignments(self, article_id: str, annotator_pool: Optional[list[str]] = None) -> list[Assignment]:
        """Assign the two first-pass annotators of an article.

        Picks the least-loaded annotators, ties broken by annotator id. The
        pool must keep a third person available for the conditional pass.
        """
        pool = annotator_pool if annotator_pool is not None else self.pool
        if len(pool) < 3:
            raise ValueError(f"annotator pool must have >= 3 members, got {len(pool)}")
        with self._lock:
            created = []
            while len(self._active(article_id, AssignmentPass.FIRST)) < 2:
                eligible = [p for p in pool if p not in self._involved(article_id)]
                if not eligible:
                    break
                created.append(
                    self._add_assignment(article_id, self._least_loaded(eligible), AssignmentPass.FIRST)
                )
            return created

    def assign_all(self) -> None:
        """Ensure every known article has its two first-pass assignments."""
        for article_id in self.article_order:
            self.create_assignments(article_id)

    def _find_assignment(self, annotator_id: str, article_id: str) -> Optional[Assignment]:
        for a in self.assignments[article_id]:
            if a.annotator_id == annotator_id:
                return a
        return None

    # -- submissions --------------------------------------------------------

    def _article_of_comment(self, comment_id: str) -> Optional[str]:
        return self._comment_article.get(comment_id)

    def submit_annotation(self, record: AnnotationRecord) -> None:
        """Validate and persist one judgment; a resubmission replaces the old one."""
        record.validate()
        with self._lock:
            article_id = self._article_of_comment(record.comment_id)
            if article_id is None:
                raise AssignmentError(f"unknown comment {record.comment_id}")
            assignment = self._find_assignment(record.annotator_id, article_id)
            if assignment is None or assignment.status is AssignmentStatus.SKIPPED:
                raise AssignmentError(
                    f"{record.annotator_id} holds no active assignment for article {article_id}"
                )
            if assignment.pass_ is AssignmentPass.THIRD:
                if record.comment_id not in self.third_pass_tasks(article_id):
                    raise AssignmentError(
                        f"comment {record.comment_id} is not part of the third pass"
                    )
            if not record.submitted_at:
                record.submitted_at = datetime.now(timezone.utc).isoformat()
            self.records[(record.annotator_id, record.comment_id)] = record
            self._append_event({"event": "annotation", **record.to_dict()})
            self._refresh_done_flags(article_id)
            self._maybe_create_third(article_id)

    def _task_comments(self, assignment: Assignment) -> list[str]:
        if assignment.pass_ is AssignmentPass.FIRST:
            comments = self.comments_by_article.get(assignment.article_id, [])
            return [c.comment_id for c in comments]
        return self.third_pass_tasks(assignment.article_id)

    def _refresh_done_flags(self, article_id: Optional[str] = None) -> None:
        articles = [article_id] if article_id else list(self.assignments)
        for aid in articles:
            for a in self.assignments[aid]:
                if a.status is AssignmentStatus.SKIPPED:
                    continue
                try:
                    wanted = self._task_comments(a)
                except AssignmentError:
                    continue
                done = all((a.annotator_id, cid) in self.records for cid in wanted)
                if wanted and done:
                    a.status = AssignmentStatus.DONE
                elif a.status is AssignmentStatus.DONE:
                    a.status = AssignmentStatus.PENDING

    # -- skip flow ----------------------------------------------------------

    def skip_article(self, annotator_id: str, article_id: str) -> None:
        """Mark the annotator's assignment skipped and requeue the article."""
        with self._lock:
            assignment = self._find_assignment(annotator_id, article_id)
            if assignment is None:
                raise AssignmentError(
                    f"{annotator_id} holds no assignment for article {article_id}"
                )
            if assignment.status is AssignmentStatus.SKIPPED:
                return  # idempotent
            assignment.status = AssignmentStatus.SKIPPED
            self._append_event(
                {"event": "skip", "annotator_id": annotator_id, "article_id": article_id}
            )
            self._requeue(article_id, assignment.pass_)

    def _requeue(self, article_id: str, pass_: AssignmentPass) -> None:
        if pass_ is AssignmentPass.THIRD:
            self._maybe_create_third(article_id)
            if not self._active(article_id, AssignmentPass.THIRD):
                self._mark_unresolvable(article_id)
            return
        eligible = [p for p in self.pool if p not in self._involved(article_id)]
        if not eligible:
            self._mark_unresolvable(article_id)
            return
        self._add_assignment(article_id, self._least_loaded(eligible), AssignmentPass.FIRST)

    def _mark_unresolvable(self, article_id: str) -> None:
        if article_id not in self.unresolvable:
            logger.warning("article %s cannot be assigned to anyone", article_id)
            self.unresolvable.add(article_id)
            self._append_event({"event": "unresolvable", "article_id": article_id})

    # -- third pass ---------------------------------------------------------

    def _first_pass_records(self, article_id: str) -> Optional[list[list[AnnotationRecord]]]:
        firsts = self._active(article_id, AssignmentPass.FIRST)
        if len(firsts) != 2 or any(a.status is not AssignmentStatus.DONE for a in firsts):
            return None
        comment_ids = [c.comment_id for c in self.comments_by_article[article_id]]
        return [
            [self.records[(a.annotator_id, cid)] for a in firsts] for cid in comment_ids
        ]

    def third_pass_tasks(self, article_id: str) -> list[str]:
        """Comments any first-pass annotator marked hateful (both-votes included)."""
        per_comment = self._first_pass_records(article_id)
        if per_comment is None:
            raise AssignmentError(
                f"article {article_id}: both first passes must be done first"
            )
        comment_ids = [c.comment_id for c in self.comments_by_article[article_id]]
        return [
            cid
            for cid, recs in zip(comment_ids, per_comment)
            if any(r.hateful for r in recs)
        ]

    def _maybe_create_third(self, article_id: str) -> None:
        try:
            tasks = self.third_pass_tasks(article_id)
        except AssignmentError:
            return
        if not tasks or self._active(article_id, AssignmentPass.THIRD):
            return
        eligible = [p for p in self.pool if p not in self._involved(article_id)]
        if not eligible:
            self._mark_unresolvable(article_id)
            return
        self._add_assignment(article_id, self._least_loaded(eligible), AssignmentPass.THIRD)

    # -- task views ---------------------------------------------------------

    def next_task(self, annotator_id: str) -> Optional[dict]:
        """The annotator's oldest pending assignment, rendered for the UI."""
        with self._lock:
            for article_id in self.article_order:
                assignment = self._find_assignment(annotator_id, article_id)
                if assignment is None or assignment.status is not AssignmentStatus.PENDING:
                    continue
                comments = self.comments_by_article[article_id]
                if assignment.pass_ is AssignmentPass.THIRD:
                    wanted = set(self.third_pass_tasks(article_id))
                    comments = [c for c in comments if c.comment_id in wanted]
                done = sum(
                    1 for c in comments if (annotator_id, c.comment_id) in self.records
                )
                article = self.articles[article_id]
                return {
                    "article": article.to_dict(),
                    "comments": [
                        {"comment_id": c.comment_id, "text": c.text} for c in comments
                    ],
                    "pass": assignment.pass_.value,
                    "progress": {"done": done, "total": len(comments)},
                }
            return None

    # -- reports ------------------------------------------------------------

    def all_records(self) -> list[AnnotationRecord]:
        return [self.records[k] for k in sorted(self.records)]

    def gold_labels(self) -> list[GoldLabel]:
        return compute_all_gold_labels(self.all_records(), strict=False)

    def agreement(self):
        return agreement_report(self.all_records())

    def statistics(self) -> dict:
        comments = [c for cs in self.comments_by_article.values() for c in cs]
        return dataset_statistics(
            self.gold_labels(),
            records=self.all_records(),
            comments=comments,
            articles=list(self.articles.values()),
        )

    def audit(self) -> list[str]:
        """Re-check stored records against the hierarchical invariant."""
        violations = []
        for record in self.records.values():
            try:
                record.validate()
            except ValueError as err:
                violations.append(f"{record.annotator_id}/{record.comment_id}: {err}")
        return violations
