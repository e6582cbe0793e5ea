"""HTTP surface for the review workflow.

Endpoints (all JSON, no authentication, bind localhost by default):

    GET  /candidates?state=unreviewed&page=1&page_size=20
    POST /reviews         body: ReviewRecord fields -> GateDecision
    GET  /stats           aggregate criterion means

Validation problems return 400, unknown records 404, duplicate reviews 409
(when re-review is disabled).
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .errors import UnknownRecordError, ValidationError
from .review import DEFAULT_THRESHOLD, ReviewRecord, aggregate_reviews, submit_review


def create_app(
    store,
    threshold: float = DEFAULT_THRESHOLD,
    allow_rereview: bool = False,
    ui_dir: Optional[str] = None,
) -> FastAPI:
    app = FastAPI(title="oeforge review API")

    @app.get("/candidates")
    def candidates(state: str = "unreviewed", page: int = 1, page_size: int = 20):
        if page < 1 or page_size < 1:
            raise HTTPException(status_code=400, detail="page and page_size must be >= 1")
        records = sorted(store.iter_generations(state=state or None), key=lambda g: g.id)
        total = len(records)
        start = (page - 1) * page_size
        items = [
            {
                "record_id": g.id,
                "en_text": g.en_text,
                "ang_text": g.ang_text,
                "flags": sorted(g.flags),
                "style_example_ids": list(g.style_example_ids),
                "review_state": g.review_state,
                "provenance": g.provenance,
            }
            for g in records[start : start + page_size]
        ]
        return {"total": total, "page": page, "page_size": page_size, "candidates": items}

    @app.post("/reviews")
    async def post_review(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise HTTPException(status_code=400, detail="JSON object expected")
        try:
            review = ReviewRecord(
                record_id=str(body.get("record_id", "")),
                reviewer=str(body.get("reviewer", "")),
                inflection=body.get("inflection"),
                word_order=body.get("word_order"),
                lexical_choice=body.get("lexical_choice"),
                semantic_coherence=body.get("semantic_coherence"),
                comment=body.get("comment"),
            )
        except ValidationError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        try:
            decision = submit_review(store, review, threshold, allow_rereview)
        except UnknownRecordError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        except ValidationError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from exc
        return decision.to_record()

    @app.get("/stats")
    def stats():
        try:
            return aggregate_reviews(store)
        except ValidationError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    @app.exception_handler(ValidationError)
    def handle_validation(_request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(store, host: str = "127.0.0.1", port: int = 8441, ui_dir: Optional[str] = None):
    """Run the review API with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(store, ui_dir=ui_dir), host=host, port=port)
