"""HTTP/JSON API over the review store, consumed by the browser frontend and
scriptable clients. Errors are returned as {code, message}."""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .curation import (
    DuplicatePairError,
    NotACandidateError,
    ReviewStore,
    UnknownAnnotatorError,
    UnknownItemError,
)


class DecisionBody(BaseModel):
    annotator: str
    verdict: str
    note: str = ""


class AddPairBody(BaseModel):
    rel_a: str
    rel_b: str
    annotator: str


def _error(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"code": code, "message": message})


def create_app(store: ReviewStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="analogykit review API")

    @app.exception_handler(UnknownItemError)
    async def _unknown_item(_: Request, exc: UnknownItemError):
        return _error(404, "unknown_item", str(exc))

    @app.exception_handler(UnknownAnnotatorError)
    async def _unknown_annotator(_: Request, exc: UnknownAnnotatorError):
        return _error(400, "unknown_annotator", str(exc))

    @app.exception_handler(NotACandidateError)
    async def _not_candidate(_: Request, exc: NotACandidateError):
        return _error(400, "not_a_candidate", str(exc))

    @app.exception_handler(DuplicatePairError)
    async def _duplicate(_: Request, exc: DuplicatePairError):
        return _error(409, "duplicate_pair", str(exc))

    @app.exception_handler(ValueError)
    async def _value_error(_: Request, exc: ValueError):
        return _error(400, "invalid_request", str(exc))

    @app.get("/api/review/pending")
    def pending(cursor: int = 0, limit: int = 20):
        items = store.pending_items()
        page = items[cursor : cursor + limit]
        next_cursor = cursor + limit if cursor + limit < len(items) else None
        return {
            "items": [i.to_dict() for i in page],
            "total_pending": len(items),
            "next_cursor": next_cursor,
        }

    @app.get("/api/review/items/{item_id:path}")
    def get_item(item_id: str):
        if item_id not in store.items:
            raise UnknownItemError(item_id)
        return store.items[item_id].to_dict()

    @app.post("/api/review/items/{item_id:path}/decision")
    def decide(item_id: str, body: DecisionBody):
        item = store.submit_decision(item_id, body.annotator, body.verdict, body.note)
        return item.to_dict()

    @app.post("/api/review/add")
    def add_pair(body: AddPairBody):
        item = store.add_pair(body.rel_a, body.rel_b, body.annotator)
        return item.to_dict()

    @app.get("/api/review/stats")
    def stats():
        return store.stats()

    @app.get("/api/review/annotators")
    def annotators():
        return {"annotators": store.annotators}

    @app.get("/api/review/candidates")
    def candidates():
        return {"candidate_sets": store.candidate_sets}

    @app.get("/api/kb/relations")
    def kb_relations():
        if store.kb is None:
            return {"relations": []}
        return {
            "relations": [
                {"id": r.id, "label": r.label, "source": r.source, "pair_count": len(r.pairs)}
                for r in sorted(store.kb.relations.values(), key=lambda r: r.id)
            ]
        }

    @app.get("/api/kb/relations/{rid:path}/pairs")
    def kb_relation_pairs(rid: str, limit: int = 50):
        if store.kb is None or rid not in store.kb.relations:
            raise UnknownItemError(rid)
        rel = store.kb.relations[rid]
        return {
            "id": rel.id,
            "label": rel.label,
            "pairs": [
                {"subject": p.subject, "object": p.object, "popularity": p.popularity}
                for p in rel.pairs[:limit]
            ],
        }

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
