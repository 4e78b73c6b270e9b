import numpy as np
import pytest
from fastapi.testclient import TestClient

from ctxhs.annotation.api import create_app
from ctxhs.annotation.store import AnnotationStore, AssignmentError
from ctxhs.types import (
    AnnotationRecord,
    Article,
    AssignmentPass,
    AssignmentStatus,
    Characteristic,
)

from conftest import make_comment

POOL = ["ana", "beto", "carla", "dani", "eva", "fran"]


def mk_store(n_articles=1, comments_per_article=3, pool=POOL, persist=None):
    store = AnnotationStore(pool, persist_path=persist)
    for a in range(n_articles):
        article_id = f"a{a}"
        article = Article(
            article_id=article_id, outlet="@diario", tweet_text=f"titular {a}", body="cuerpo"
        )
        comments = [
            make_comment(f"{article_id}_c{i}", article_id, f"comentario {i}")
            for i in range(comments_per_article)
        ]
        store.add_article(article, comments)
    return store


def hateful_record(annotator, comment, calls=False, chars=(Characteristic.RACISM,)):
    return AnnotationRecord(
        annotator_id=annotator,
        comment_id=comment,
        hateful=True,
        calls_to_action=calls,
        characteristics=frozenset(chars),
    )


def benign_record(annotator, comment):
    return AnnotationRecord(annotator_id=annotator, comment_id=comment, hateful=False)


def complete_first_pass(store, article_id, verdicts):
    """verdicts: {annotator: {comment_id: hateful}}"""
    for annotator, votes in verdicts.items():
        for comment_id, hateful in votes.items():
            record = (
                hateful_record(annotator, comment_id) if hateful
                else benign_record(annotator, comment_id)
            )
            store.submit_annotation(record)


class TestAssignmentScheduling:
    def test_two_distinct_first_assignments(self):
        store = mk_store()
        created = store.create_assignments("a0")
        assert len(created) == 2
        assert len({a.annotator_id for a in created}) == 2
        assert all(a.pass_ is AssignmentPass.FIRST for a in created)

    def test_small_pool_rejected(self):
        store = AnnotationStore(["ana", "beto"])
        store.add_article(Article("a0", "@d", "t", "b"), [make_comment("c", "a0")])
        with pytest.raises(ValueError):
            store.create_assignments("a0")

    def test_idempotent_per_article(self):
        store = mk_store()
        store.create_assignments("a0")
        assert store.create_assignments("a0") == []

    def test_hundred_articles_balanced_within_one(self):
        store = mk_store(n_articles=100)
        store.assign_all()
        loads = [store._first_load(p) for p in POOL]
        mean = float(np.mean(loads))
        assert sum(loads) == 200
        assert all(abs(load - mean) <= 1.0 for load in loads)


class TestSubmission:
    def test_non_hateful_accepted(self):
        store = mk_store()
        store.assign_all()
        annotator = store.assignments["a0"][0].annotator_id
        store.submit_annotation(benign_record(annotator, "a0_c0"))
        assert (annotator, "a0_c0") in store.records

    def test_hateful_with_characteristic_accepted(self):
        store = mk_store()
        store.assign_all()
        annotator = store.assignments["a0"][0].annotator_id
        store.submit_annotation(hateful_record(annotator, "a0_c0", calls=False))

    def test_invalid_hierarchy_rejected(self):
        store = mk_store()
        store.assign_all()
        annotator = store.assignments["a0"][0].annotator_id
        with pytest.raises(ValueError):
            store.submit_annotation(
                AnnotationRecord(annotator, "a0_c0", hateful=True,
                                 calls_to_action=True, characteristics=frozenset())
            )
        with pytest.raises(ValueError):
            store.submit_annotation(
                AnnotationRecord(annotator, "a0_c0", hateful=False,
                                 characteristics=frozenset({Characteristic.WOMEN}))
            )

    def test_unassigned_annotator_rejected(self):
        store = mk_store()
        store.assign_all()
        assigned = {a.annotator_id for a in store.assignments["a0"]}
        outsider = next(p for p in POOL if p not in assigned)
        with pytest.raises(AssignmentError):
            store.submit_annotation(benign_record(outsider, "a0_c0"))

    def test_resubmission_replaces(self):
        store = mk_store()
        store.assign_all()
        annotator = store.assignments["a0"][0].annotator_id
        store.submit_annotation(benign_record(annotator, "a0_c0"))
        store.submit_annotation(hateful_record(annotator, "a0_c0"))
        assert store.records[(annotator, "a0_c0")].hateful

    def test_done_after_all_comments(self):
        store = mk_store(comments_per_article=2)
        store.assign_all()
        assignment = store.assignments["a0"][0]
        store.submit_annotation(benign_record(assignment.annotator_id, "a0_c0"))
        assert assignment.status is AssignmentStatus.PENDING
        store.submit_annotation(benign_record(assignment.annotator_id, "a0_c1"))
        assert assignment.status is AssignmentStatus.DONE


class TestSkip:
    def test_skip_requeues_to_other_annotator(self):
        store = mk_store()
        store.assign_all()
        first, second = store.assignments["a0"][:2]
        store.skip_article(first.annotator_id, "a0")
        assert first.status is AssignmentStatus.SKIPPED
        active = [
            a for a in store.assignments["a0"]
            if a.status is not AssignmentStatus.SKIPPED and a.pass_ is AssignmentPass.FIRST
        ]
        assert len(active) == 2
        assert first.annotator_id not in {a.annotator_id for a in active}

    def test_double_skip_is_noop(self):
        store = mk_store()
        store.assign_all()
        first = store.assignments["a0"][0]
        store.skip_article(first.annotator_id, "a0")
        n_assignments = len(store.assignments["a0"])
        store.skip_article(first.annotator_id, "a0")
        assert len(store.assignments["a0"]) == n_assignments

    def test_skip_without_assignment_rejected(self):
        store = mk_store()
        store.assign_all()
        outsider = next(
            p for p in POOL if p not in {a.annotator_id for a in store.assignments["a0"]}
        )
        with pytest.raises(AssignmentError):
            store.skip_article(outsider, "a0")

    def test_everyone_skipping_flags_unresolvable(self):
        store = mk_store(pool=POOL[:4])
        store.assign_all()
        for _ in range(len(POOL[:4])):
            pending = [
                a for a in store.assignments["a0"] if a.status is AssignmentStatus.PENDING
            ]
            if not pending:
                break
            store.skip_article(pending[0].annotator_id, "a0")
        assert "a0" in store.unresolvable


class TestThirdPass:
    def _two_firsts(self, store, article="a0"):
        store.assign_all()
        return [a.annotator_id for a in store.assignments[article][:2]]

    def test_requires_completed_first_passes(self):
        store = mk_store()
        self._two_firsts(store)
        with pytest.raises(AssignmentError):
            store.third_pass_tasks("a0")

    def test_split_and_double_hateful_included(self):
        store = mk_store(comments_per_article=3)
        a1, a2 = self._two_firsts(store)
        complete_first_pass(store, "a0", {
            a1: {"a0_c0": True, "a0_c1": False, "a0_c2": True},
            a2: {"a0_c0": False, "a0_c1": False, "a0_c2": True},
        })
        # c0 split (H,N) -> third pass; c1 (N,N) excluded; c2 (H,H) still included
        assert store.third_pass_tasks("a0") == ["a0_c0", "a0_c2"]

    def test_third_assignment_created_distinct(self):
        store = mk_store(comments_per_article=1)
        a1, a2 = self._two_firsts(store)
        complete_first_pass(store, "a0", {a1: {"a0_c0": True}, a2: {"a0_c0": False}})
        thirds = [a for a in store.assignments["a0"] if a.pass_ is AssignmentPass.THIRD]
        assert len(thirds) == 1
        assert thirds[0].annotator_id not in {a1, a2}

    def test_third_annotator_limited_to_flagged_comments(self):
        store = mk_store(comments_per_article=2)
        a1, a2 = self._two_firsts(store)
        complete_first_pass(store, "a0", {
            a1: {"a0_c0": True, "a0_c1": False},
            a2: {"a0_c0": False, "a0_c1": False},
        })
        third = next(a for a in store.assignments["a0"] if a.pass_ is AssignmentPass.THIRD)
        with pytest.raises(AssignmentError):
            store.submit_annotation(benign_record(third.annotator_id, "a0_c1"))
        store.submit_annotation(benign_record(third.annotator_id, "a0_c0"))

    def test_no_third_when_nothing_hateful(self):
        store = mk_store(comments_per_article=1)
        a1, a2 = self._two_firsts(store)
        complete_first_pass(store, "a0", {a1: {"a0_c0": False}, a2: {"a0_c0": False}})
        assert store.third_pass_tasks("a0") == []
        assert all(a.pass_ is AssignmentPass.FIRST for a in store.assignments["a0"])


class TestGoldAndAudit:
    def test_gold_after_third_vote(self):
        store = mk_store(comments_per_article=1)
        store.assign_all()
        a1, a2 = [a.annotator_id for a in store.assignments["a0"][:2]]
        complete_first_pass(store, "a0", {a1: {"a0_c0": True}, a2: {"a0_c0": False}})
        third = next(a for a in store.assignments["a0"] if a.pass_ is AssignmentPass.THIRD)
        store.submit_annotation(hateful_record(third.annotator_id, "a0_c0", calls=False))
        gold = store.gold_labels()
        assert len(gold) == 1 and gold[0].hateful

    def test_task_view_progress(self):
        store = mk_store(comments_per_article=3)
        store.assign_all()
        annotator = store.assignments["a0"][0].annotator_id
        task = store.next_task(annotator)
        assert task["pass"] == "FIRST"
        assert task["progress"] == {"done": 0, "total": 3}
        store.submit_annotation(benign_record(annotator, "a0_c0"))
        assert store.next_task(annotator)["progress"]["done"] == 1

    def test_next_task_none_when_idle(self):
        store = mk_store()
        assert store.next_task("ana") is None

    def test_audit_clean(self):
        store = mk_store()
        store.assign_all()
        annotator = store.assignments["a0"][0].annotator_id
        store.submit_annotation(benign_record(annotator, "a0_c0"))
        assert store.audit() == []


class TestPersistence:
    def test_replay_restores_state(self, tmp_path):
        log = tmp_path / "records.log"
        store = mk_store(n_articles=2, persist=log)
        store.assign_all()
        a1 = store.assignments["a0"][0].annotator_id
        store.submit_annotation(benign_record(a1, "a0_c0"))
        store.skip_article(store.assignments["a1"][0].annotator_id, "a1")

        revived = mk_store(n_articles=2, persist=log)
        revived.recover()
        assert revived.records.keys() == store.records.keys()
        assert [a.to_dict() for a in revived.assignments["a0"]] == [
            a.to_dict() for a in store.assignments["a0"]
        ]
        assert [a.to_dict() for a in revived.assignments["a1"]] == [
            a.to_dict() for a in store.assignments["a1"]
        ]

    def test_replay_does_not_duplicate_log(self, tmp_path):
        log = tmp_path / "records.log"
        store = mk_store(persist=log)
        store.assign_all()
        size = log.read_text().count("\n")
        revived = mk_store(persist=log)
        revived.recover()
        assert log.read_text().count("\n") == size


class TestApi:
    @pytest.fixture
    def client(self):
        store = mk_store(n_articles=2, comments_per_article=3)
        store.assign_all()
        self.store = store
        return TestClient(create_app(store))

    def test_next_task_flow(self, client):
        annotator = self.store.assignments["a0"][0].annotator_id
        body = client.get(f"/tasks/next?annotator={annotator}").json()
        assert body["task"]["article"]["article_id"] == "a0"
        assert len(body["task"]["comments"]) == 3

    def test_unknown_annotator_forbidden(self, client):
        assert client.get("/tasks/next?annotator=nadie").status_code == 403

    def test_submit_and_progress(self, client):
        annotator = self.store.assignments["a0"][0].annotator_id
        response = client.post("/annotations", json={
            "annotator_id": annotator,
            "comment_id": "a0_c0",
            "hateful": True,
            "calls_to_action": False,
            "characteristics": ["RACISM"],
        })
        assert response.status_code == 201
        task = client.get(f"/tasks/next?annotator={annotator}").json()["task"]
        assert task["progress"]["done"] == 1

    def test_invalid_hierarchy_422(self, client):
        annotator = self.store.assignments["a0"][0].annotator_id
        response = client.post("/annotations", json={
            "annotator_id": annotator,
            "comment_id": "a0_c0",
            "hateful": True,
            "calls_to_action": True,
            "characteristics": [],
        })
        assert response.status_code == 422

    def test_unassigned_403(self, client):
        outsider = next(
            p for p in POOL
            if p not in {a.annotator_id for a in self.store.assignments["a0"]}
        )
        response = client.post("/annotations", json={
            "annotator_id": outsider, "comment_id": "a0_c0", "hateful": False,
        })
        assert response.status_code == 403

    def test_skip_endpoint(self, client):
        annotator = self.store.assignments["a0"][0].annotator_id
        response = client.post("/skip", json={"annotator_id": annotator, "article_id": "a0"})
        assert response.status_code == 200
        task = client.get(f"/tasks/next?annotator={annotator}").json()["task"]
        assert task is None or task["article"]["article_id"] != "a0"

    def test_report_endpoints(self, client):
        annotators = [a.annotator_id for a in self.store.assignments["a0"][:2]]
        for annotator in annotators:
            for i in range(3):
                client.post("/annotations", json={
                    "annotator_id": annotator, "comment_id": f"a0_c{i}", "hateful": False,
                })
        gold = client.get("/gold").json()["gold"]
        assert len(gold) == 3 and not any(g["hateful"] for g in gold)
        assert "labels" in gold[0] and gold[0]["labels"] == [0] * 9
        agreement = client.get("/agreement").json()
        assert "alpha_hateful" in agreement
        stats = client.get("/stats").json()
        assert stats["totals"]["comments"] == 3
