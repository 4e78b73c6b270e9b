"""Simulate the annotation workflow end to end, without HTTP.

Six annotators label a couple of articles: two first passes per article, a
conditional third pass for comments anyone marked hateful, skip handling,
gold aggregation and agreement. Run with:

    python demos/02_annotation_workflow.py
"""

import json

from ctxhs.annotation.store import AnnotationStore
from ctxhs.types import AnnotationRecord, Article, Characteristic, Comment

POOL = ["ana", "beto", "carla", "dani", "eva", "fran"]

store = AnnotationStore(POOL)
for a in range(2):
    article = Article(f"a{a}", "@diario", f"titular {a}", "cuerpo de la nota")
    comments = [Comment(f"a{a}_c{i}", f"a{a}", f"comentario {i}") for i in range(3)]
    store.add_article(article, comments)
store.assign_all()

print("=== assignments (least-loaded, two per article) ===")
for article_id, assignments in store.assignments.items():
    print(f"  {article_id}: {[a.annotator_id for a in assignments]}")

print("\n=== first passes ===")
verdicts = {"a0_c0": True, "a0_c1": False, "a0_c2": True}
first_annotators = [a.annotator_id for a in store.assignments["a0"][:2]]
for n, annotator in enumerate(first_annotators):
    for comment_id, hateful in verdicts.items():
        hateful_vote = hateful and n == 0  # the two annotators disagree on hateful ones
        record = AnnotationRecord(
            annotator_id=annotator,
            comment_id=comment_id,
            hateful=hateful_vote,
            calls_to_action=False if hateful_vote else None,
            characteristics=frozenset({Characteristic.RACISM}) if hateful_vote else frozenset(),
        )
        store.submit_annotation(record)
print("third-pass queue for a0:", store.third_pass_tasks("a0"))

third = next(a for a in store.assignments["a0"] if a.pass_.value == "THIRD")
print("third annotator:", third.annotator_id, "(distinct from both first passes)")
for comment_id in store.third_pass_tasks("a0"):
    store.submit_annotation(
        AnnotationRecord(
            annotator_id=third.annotator_id,
            comment_id=comment_id,
            hateful=True,
            calls_to_action=True,
            characteristics=frozenset({Characteristic.RACISM, Characteristic.CLASS}),
        )
    )

print("\n=== skip flow on a1 ===")
skipper = store.assignments["a1"][0].annotator_id
store.skip_article(skipper, "a1")
replacement = [a.annotator_id for a in store.assignments["a1"] if a.status.value != "SKIPPED"]
print(f"{skipper} skipped; active annotators now {replacement}")

print("\n=== gold labels ===")
for gold in store.gold_labels():
    print(" ", json.dumps(gold.to_dict(), ensure_ascii=False))

print("\n=== agreement ===")
print(json.dumps(store.agreement().to_dict(), indent=2))

print("\n=== statistics ===")
print(json.dumps(store.statistics()["totals"], indent=2))
