"""Session-oriented HTTP API around the dialogue engine.

All conversation state lives server-side keyed by session id, so the web
UI and the simulator share one code path. Turns within a session are
serialized: a message that arrives while another is in flight gets 409.
"""

from __future__ import annotations

import os
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles

from .catalog import load_catalog_with_sidecar
from .config import ServiceConfig, load_service_config
from .dialogue import PHASE_DONE, DialogueEngine, SessionStore
from .fixtures import default_catalog_csv, default_catalog_schema

VALID_STRATEGIES = ("es", "cr")
MAX_QUESTION_LIMIT = 5


def create_app(
    config: ServiceConfig | None = None,
    engine: DialogueEngine | None = None,
) -> FastAPI:
    if config is None:
        config = load_service_config(os.environ.get("ASKREC_CONFIG"))
    if engine is None:
        catalog = load_catalog_with_sidecar(
            config.catalog_csv or default_catalog_csv(),
            config.catalog_schema or default_catalog_schema(),
        )
        engine = DialogueEngine(catalog, config.engine)
    sessions = SessionStore(config.session_log_dir)

    app = FastAPI(title="askrec", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    app.state.engine = engine
    app.state.sessions = sessions

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "items": len(engine.catalog)}

    @app.get("/catalog/schema")
    def catalog_schema() -> dict:
        return {
            "dimensions": [
                {
                    "name": s.name,
                    "kind": s.kind,
                    "unit": s.unit,
                    "relaxation_rank": s.relaxation_rank,
                    "question_label": s.question_label,
                }
                for s in engine.catalog.schema
            ]
        }

    @app.post("/sessions", status_code=201)
    def create_session(payload: dict | None = Body(None)) -> dict:
        payload = payload or {}
        strategy = str(payload.get("strategy", engine.config.strategy)).lower()
        if strategy not in VALID_STRATEGIES:
            raise HTTPException(status_code=400, detail=f"invalid strategy {strategy!r}")
        k = payload.get("k", engine.config.max_questions)
        if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k <= MAX_QUESTION_LIMIT:
            raise HTTPException(status_code=400, detail="k must be an integer in [0, 5]")
        state = engine.new_session(strategy=strategy, max_questions=k)
        sessions.add(state)
        sessions.log_event(state.session_id, {"event": "created", "strategy": strategy, "k": k})
        return {"session_id": state.session_id, "strategy": strategy, "k": k}

    @app.post("/sessions/{session_id}/messages")
    def post_message(
        session_id: str,
        payload: dict | None = Body(None),
        debug: int = Query(0),
    ) -> dict:
        state = sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail="unknown session")
        text = (payload or {}).get("text", "")
        if not isinstance(text, str) or not text.strip():
            raise HTTPException(status_code=400, detail="text must be a non-empty string")
        lock = sessions.lock(session_id)
        if not lock.acquire(blocking=False):
            raise HTTPException(status_code=409, detail="previous message still processing")
        try:
            if state.phase == PHASE_DONE:
                raise HTTPException(status_code=409, detail="session already finished")
            result = engine.advance_turn(state, text)
        finally:
            lock.release()

        response: dict = {
            "type": result.kind,
            "relaxed": list(result.relaxed_dimensions),
            "candidate_count": result.candidate_count,
        }
        if result.kind == "question" and result.question is not None:
            response["question"] = result.question.to_json()
        if result.kind == "recommendations" and result.grid is not None:
            response["grid"] = result.grid.to_json(engine.catalog)
            item_ids = result.grid.item_ids()
            matches = engine.liked_matches(state.liked, item_ids)
            response["items_detail"] = {
                item_id: {
                    "description": engine.catalog.item(item_id).description,
                    "pros": list(engine.catalog.item(item_id).pros),
                    "cons": list(engine.catalog.item(item_id).cons),
                    "matched_likes": matches[item_id],
                }
                for item_id in item_ids
            }
        if debug and result.entropy is not None:
            response["entropy_debug"] = result.entropy.to_json()
        sessions.log_event(session_id, {"event": "turn", "text": text, "response": response})
        return response

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> dict:
        state = sessions.get(session_id)
        if state is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return state.snapshot()

    static_dir = config.static_dir
    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
