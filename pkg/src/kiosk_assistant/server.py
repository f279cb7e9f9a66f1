"""HTTP service exposing the kiosk pipeline.

Endpoints: POST /api/ask, POST /api/classify, GET /api/events (NDJSON
stream), GET /api/stats, GET /healthz, plus an optional static mount of the
kiosk web UI at /ui.  Requests flow command routing first, then classifier-
assisted FAQ retrieval; every answered request is logged for analytics and
its events are broadcast to all stream subscribers.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator, Optional, Sequence

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .analytics import DAY_BASES, RequestLog, RequestRecord, compute_stats
from .classify import MnbModel, predict
from .events import (
    DEFAULT_RULES,
    CommandRule,
    EventBroadcaster,
    KioskEvent,
    Subscription,
    route,
    to_wire,
    validate_rules,
)
from .qa import DEFAULT_FALLBACK_TEXT, FaqEntry, answer

logger = logging.getLogger(__name__)

MAX_TEXT_LEN = 2048

# How often the event stream wakes to notice closed connections.
_STREAM_POLL_SECONDS = 0.5


@dataclass(frozen=True)
class AskOutcome:
    answer_text: str
    intent: str
    score: float
    fallback: bool
    events: tuple[KioskEvent, ...]


class KioskEngine:
    """The request pipeline: command routing, then FAQ retrieval.

    Immutable after construction apart from the analytics log and the event
    broadcaster, both of which serialize their own writes, so one engine can
    serve concurrent requests.
    """

    def __init__(
        self,
        kb: Sequence[FaqEntry],
        rules: Sequence[CommandRule] = DEFAULT_RULES,
        model: Optional[MnbModel] = None,
        threshold: float = 0.5,
        stop_words: frozenset[str] = frozenset(),
        fallback_text: str = DEFAULT_FALLBACK_TEXT,
        log: Optional[RequestLog] = None,
        broadcaster: Optional[EventBroadcaster] = None,
    ) -> None:
        validate_rules(rules)
        self.kb = tuple(kb)
        self.rules = tuple(rules)
        self.model = model
        self.threshold = threshold
        self.stop_words = stop_words
        self.fallback_text = fallback_text
        self.log = log if log is not None else RequestLog()
        self.broadcaster = broadcaster if broadcaster is not None else EventBroadcaster()
        self._entries_by_id = {entry.id: entry for entry in self.kb}

    def ask(self, text: str) -> AskOutcome:
        if not text:
            raise ValueError("text must be non-empty")
        match = route(text, self.rules)
        if match is not None:
            rule, events = match
            published = tuple(self.broadcaster.publish(event) for event in events)
            outcome = AskOutcome(
                answer_text=rule.response_text,
                intent=rule.triggers[0],
                score=1.0,
                fallback=False,
                events=published,
            )
        else:
            result = answer(
                text,
                self.kb,
                model=self.model,
                threshold=self.threshold,
                category_filter=True,
                stop_words=self.stop_words,
                fallback_text=self.fallback_text,
            )
            talk = KioskEvent(
                seq=0,
                kind="avatar_animation",
                name="talk",
                payload=result.answer_text,
                ts=datetime.now(timezone.utc),
            )
            published = (self.broadcaster.publish(talk),)
            if result.fallback:
                intent = "fallback"
            else:
                entry = self._entries_by_id[result.entry_id]
                intent = entry.category or "faq"
            outcome = AskOutcome(
                answer_text=result.answer_text,
                intent=intent,
                score=result.score,
                fallback=result.fallback,
                events=published,
            )
        self._record(text, outcome)
        return outcome

    def _record(self, text: str, outcome: AskOutcome) -> None:
        # Logging is best-effort: an analytics failure must never fail the
        # request itself.
        try:
            self.log.append(
                RequestRecord(
                    ts=datetime.now(timezone.utc),
                    text=text,
                    intent=outcome.intent,
                    score=outcome.score,
                )
            )
        except OSError as exc:
            logger.warning("could not record request: %s", exc)


class AskRequest(BaseModel):
    text: str


class EventModel(BaseModel):
    seq: int
    kind: str
    name: str
    payload: str
    ts: str


class AskResponse(BaseModel):
    answer_text: str
    intent: str
    score: float
    fallback: bool
    events: list[EventModel]


class ClassifyRequest(BaseModel):
    text: str


class ClassifyResponse(BaseModel):
    label: str
    posteriors: dict[str, float]


class TopRequest(BaseModel):
    text: str
    count: int


class StatsResponse(BaseModel):
    total: int
    by_weekday: list[int]
    mean_daily: float
    top_requests: list[TopRequest]


def _event_stream(broadcaster: EventBroadcaster, subscription: Subscription) -> Iterator[bytes]:
    try:
        while True:
            item = subscription.get(timeout=_STREAM_POLL_SECONDS)
            if item is None:
                if broadcaster.closed:
                    return
                # Suspension point so client disconnects are noticed; an
                # empty chunk writes nothing on the wire.
                yield b""
                continue
            yield (json.dumps(to_wire(item), ensure_ascii=False) + "\n").encode("utf-8")
    finally:
        subscription.close()


def create_app(
    engine: Optional[KioskEngine] = None, ui_dir: Optional[str | Path] = None
) -> FastAPI:
    app = FastAPI(title="kiosk-assistant")
    app.state.engine = engine
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def require_engine() -> KioskEngine:
        current = app.state.engine
        if current is None:
            raise HTTPException(status_code=503, detail="engine is not loaded")
        return current

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/api/ask", response_model=AskResponse)
    def api_ask(body: AskRequest) -> AskResponse:
        current = require_engine()
        if not body.text:
            raise HTTPException(status_code=400, detail="text must be non-empty")
        if len(body.text) > MAX_TEXT_LEN:
            raise HTTPException(
                status_code=400, detail=f"text exceeds {MAX_TEXT_LEN} characters"
            )
        outcome = current.ask(body.text)
        return AskResponse(
            answer_text=outcome.answer_text,
            intent=outcome.intent,
            score=outcome.score,
            fallback=outcome.fallback,
            events=[EventModel(**to_wire(event)) for event in outcome.events],
        )

    @app.post("/api/classify", response_model=ClassifyResponse)
    def api_classify(body: ClassifyRequest) -> ClassifyResponse:
        current = require_engine()
        if current.model is None:
            raise HTTPException(status_code=503, detail="no classifier model is loaded")
        if not body.text:
            raise HTTPException(status_code=400, detail="text must be non-empty")
        label, posteriors = predict(current.model, body.text, stop_words=current.stop_words)
        return ClassifyResponse(label=label, posteriors=posteriors)

    @app.get("/api/events")
    def api_events() -> StreamingResponse:
        current = require_engine()
        # Subscribe here, not in the generator: the subscription must exist
        # by the time the response headers are out, or an event published
        # right after connecting could be missed.
        subscription = current.broadcaster.subscribe()
        return StreamingResponse(
            _event_stream(current.broadcaster, subscription),
            media_type="application/x-ndjson",
        )

    @app.get("/api/stats", response_model=StatsResponse)
    def api_stats(
        top: int = Query(default=10, ge=1),
        days: str = Query(default="calendar", pattern="^(" + "|".join(DAY_BASES) + ")$"),
    ) -> StatsResponse:
        current = require_engine()
        stats = compute_stats(current.log.records(), top_k=top, day_basis=days)
        return StatsResponse(
            total=stats.total,
            by_weekday=list(stats.by_weekday),
            mean_daily=stats.mean_daily,
            top_requests=[TopRequest(text=t, count=c) for t, c in stats.top_requests],
        )

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
