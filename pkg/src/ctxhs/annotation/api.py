"""HTTP API over the annotation store.

Endpoints:
  GET  /tasks/next?annotator=ID  next article with its comments, or null task
  POST /annotations              one AnnotationRecord as JSON
  POST /skip                     {annotator_id, article_id}
  GET  /gold                     aggregated labels computed so far
  GET  /agreement                alpha per label
  GET  /stats                    corpus statistics
"""

from __future__ import annotations

from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from ..types import AnnotationRecord, Characteristic
from .store import AnnotationStore, AssignmentError


class AnnotationIn(BaseModel):
    annotator_id: str
    comment_id: str
    hateful: bool
    calls_to_action: Optional[bool] = None
    characteristics: list[str] = []
    submitted_at: str = ""

    def to_record(self) -> AnnotationRecord:
        try:
            characteristics = frozenset(Characteristic(c) for c in self.characteristics)
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err))
        return AnnotationRecord(
            annotator_id=self.annotator_id,
            comment_id=self.comment_id,
            hateful=self.hateful,
            calls_to_action=self.calls_to_action,
            characteristics=characteristics,
            submitted_at=self.submitted_at,
        )


class SkipIn(BaseModel):
    annotator_id: str
    article_id: str


def create_app(store: AnnotationStore) -> FastAPI:
    app = FastAPI(title="ctxhs annotation API")
    # the labeling frontend is served separately, so browsers need CORS
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/tasks/next")
    def next_task(annotator: str):
        if annotator not in store.pool:
            raise HTTPException(status_code=403, detail=f"unknown annotator {annotator!r}")
        return {"task": store.next_task(annotator)}

    @app.post("/annotations", status_code=201)
    def submit(annotation: AnnotationIn):
        record = annotation.to_record()
        try:
            record.validate()
        except ValueError as err:
            raise HTTPException(status_code=422, detail=str(err))
        try:
            store.submit_annotation(record)
        except AssignmentError as err:
            raise HTTPException(status_code=403, detail=str(err))
        return {"stored": True, "comment_id": record.comment_id}

    @app.post("/skip")
    def skip(body: SkipIn):
        try:
            store.skip_article(body.annotator_id, body.article_id)
        except AssignmentError as err:
            raise HTTPException(status_code=404, detail=str(err))
        return {"skipped": True, "article_id": body.article_id}

    @app.get("/gold")
    def gold():
        return {"gold": [g.to_dict() for g in store.gold_labels()]}

    @app.get("/agreement")
    def agreement():
        return store.agreement().to_dict()

    @app.get("/stats")
    def stats():
        return store.statistics()

    return app
