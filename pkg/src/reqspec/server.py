"""HTTP service exposing the dialogue engine, batch processing, and
knowledge-base administration. The endpoint set is documented in
docs/api.md; the CLI chat command drives the exact same engine, so both
transports produce identical reply payloads.
"""

from __future__ import annotations

import json
import threading
import time
import uuid

from fastapi import Body, FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .config import ServiceConfig
from .dialogue import Engine, Session
from .errors import EmptyTerm, NotProposing, ReqspecError, SessionDone
from .extract import load_comparator_lexicon, load_vague_terms
from .guard import KnowledgeStore
from .knowledge import load_kb, load_seed_kb
from .reqmodel import KeyKind


class _SessionRegistry:
    """In-memory sessions with TTL eviction and per-session serialization."""

    def __init__(self, ttl: float):
        self.ttl = ttl
        self._lock = threading.Lock()
        self._sessions: dict[str, tuple[Session, threading.Lock, float]] = {}

    def create(self, session: Session) -> str:
        external_id = uuid.uuid4().hex
        with self._lock:
            self._sessions[external_id] = (session, threading.Lock(), time.time())
        return external_id

    def get(self, external_id: str):
        now = time.time()
        with self._lock:
            self._evict(now)
            entry = self._sessions.get(external_id)
            if entry is None:
                return None
            session, lock, _ = entry
            self._sessions[external_id] = (session, lock, now)
            return session, lock

    def _evict(self, now: float):
        dead = [sid for sid, (_, _, seen) in self._sessions.items()
                if now - seen > self.ttl]
        for sid in dead:
            del self._sessions[sid]


def build_engine(config: ServiceConfig) -> Engine:
    kb = load_kb(config.kb_path) if config.kb_path else load_seed_kb()
    store = KnowledgeStore(kb, config.guard_config(),
                           audit_path=config.audit_path or None)
    lexicon = (load_comparator_lexicon(config.comparator_lexicon_path)
               if config.comparator_lexicon_path else load_comparator_lexicon())
    vague = (load_vague_terms(config.vague_terms_path)
             if config.vague_terms_path else load_vague_terms())
    return Engine(store, comparator_lexicon=lexicon, vague_terms=vague)


def create_app(config: ServiceConfig = None, engine: Engine = None) -> FastAPI:
    config = config or ServiceConfig()
    engine = engine or build_engine(config)
    app = FastAPI(title="reqspec", version="0.1.0")
    registry = _SessionRegistry(config.session_ttl)
    requirements: dict[str, dict] = {}

    def _persist_confirmed(record: dict):
        if config.confirmed_path:
            with open(config.confirmed_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    @app.exception_handler(ReqspecError)
    async def _domain_error(_request: Request, exc: ReqspecError):
        status = 409 if isinstance(exc, (SessionDone, NotProposing)) else 400
        return JSONResponse(status_code=status, content={"error": str(exc)})

    @app.post("/sessions")
    def create_session():
        session = engine.start_session()
        external_id = registry.create(session)
        return {"id": external_id}

    def _locked_session(session_id: str):
        entry = registry.get(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return entry

    def _session_payload(session_id: str, session: Session, reply) -> dict:
        active = session.current or (session.history[-1] if session.history
                                     else None)
        if active is not None:
            requirements[active.id] = active.to_dict()
        return {
            "session_id": session_id,
            "state": session.state,
            "clarification_count": session.clarification_count,
            "requirement_id": active.id if active else None,
            "reply": reply.to_dict(),
        }

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: dict = Body(...)):
        text = body.get("text", "")
        if not text.strip():
            raise HTTPException(status_code=400, detail="empty message")
        session, lock = _locked_session(session_id)
        with lock:
            reply = engine.handle_message(session, text)
            return _session_payload(session_id, session, reply)

    @app.post("/sessions/{session_id}/confirm")
    def post_confirm(session_id: str):
        session, lock = _locked_session(session_id)
        with lock:
            reply = engine.confirm(session)
            _persist_confirmed(engine.confirmed[-1])
            return _session_payload(session_id, session, reply)

    @app.post("/sessions/{session_id}/revise")
    def post_revise(session_id: str, body: dict = Body(...)):
        try:
            kind = KeyKind(body.get("kind", ""))
        except ValueError:
            raise HTTPException(status_code=400, detail="unknown key kind")
        phrase = body.get("phrase", "")
        if not phrase.strip():
            raise HTTPException(status_code=400, detail="empty phrase")
        session, lock = _locked_session(session_id)
        with lock:
            reply = engine.revise(session, kind, phrase)
            return _session_payload(session_id, session, reply)

    @app.post("/requirements/batch")
    async def post_batch(request: Request):
        content_type = request.headers.get("content-type", "")
        raw = await request.body()
        if content_type.startswith("application/json"):
            payload = json.loads(raw)
            lines = payload.get("lines", [])
        else:
            lines = raw.decode("utf-8").splitlines()
        return engine.process_batch(lines)

    @app.get("/requirements/{requirement_id}")
    def get_requirement(requirement_id: str):
        record = requirements.get(requirement_id)
        if record is None:
            raise HTTPException(status_code=404, detail="unknown requirement")
        return record

    @app.get("/knowledge/stats")
    def knowledge_stats():
        return engine.store.kb.stats().to_dict()

    @app.post("/knowledge/terms")
    def promote_term(body: dict = Body(...)):
        try:
            kind = KeyKind(body.get("kind", ""))
        except ValueError:
            raise HTTPException(status_code=400, detail="unknown key kind")
        term = body.get("term", "")
        try:
            verdict = engine.store.promote(term, kind)
        except EmptyTerm as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return verdict.to_dict()

    @app.get("/export/confirmed")
    def export_confirmed():
        return {"confirmed": engine.confirmed}

    if config.static_dir:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True),
                  name="ui")

    app.state.engine = engine
    app.state.config = config
    return app


def serve(config: ServiceConfig):
    """Blocking entry point used by the CLI."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.listen_host, port=config.listen_port,
                log_level="warning")
