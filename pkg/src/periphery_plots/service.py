"""Session-holding HTTP service and the interaction-event wire format.

One session owns one dataset, one figure spec, and the current zone
layout. Events are applied serially per session under a lock and bump a
revision counter; clients send the revision they believe is current and
get a 409 with the authoritative scene when they are stale. Scenes are
always rendered server-side and returned whole, so clients stay
stateless and replaying an event log reproduces the final figure byte
for byte.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from . import scene as sc
from .ingest import FigureSpec, IngestError, dataset_extent, parse_csv, parse_spec
from .summarize import Series
from .timeline import (
    BoundaryLockedError,
    Hover,
    IndexOutOfRangeError,
    InteractionEvent,
    Pan,
    ResizeBoundary,
    TimelineError,
    ToggleLock,
    ZoneLayout,
    Zoom,
    apply_event,
)

DEFAULT_WIDTH = 1200.0
DEFAULT_HEIGHT = 600.0
DEFAULT_IDLE_TIMEOUT_S = 30 * 60


class ProtocolError(Exception):
    code = "MalformedEvent"


def event_to_json(event: InteractionEvent) -> dict:
    if isinstance(event, ResizeBoundary):
        return {"type": "resize_boundary", "boundary_index": event.boundary_index,
                "new_time": event.new_time}
    if isinstance(event, ToggleLock):
        return {"type": "toggle_lock", "boundary_index": event.boundary_index}
    if isinstance(event, Pan):
        return {"type": "pan", "delta_ms": event.delta_ms}
    if isinstance(event, Zoom):
        return {"type": "zoom", "factor": event.factor, "anchor": event.anchor}
    if isinstance(event, Hover):
        return {"type": "hover", "time": event.time}
    raise TypeError(f"unknown event {event!r}")


def _int_field(obj: dict, key: str) -> int:
    v = obj.get(key)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ProtocolError(f"event field {key!r} must be an integer")
    return v


def event_from_json(obj) -> InteractionEvent:
    if not isinstance(obj, dict):
        raise ProtocolError("event must be an object")
    kind = obj.get("type")
    if kind == "resize_boundary":
        return ResizeBoundary(_int_field(obj, "boundary_index"), _int_field(obj, "new_time"))
    if kind == "toggle_lock":
        return ToggleLock(_int_field(obj, "boundary_index"))
    if kind == "pan":
        return Pan(_int_field(obj, "delta_ms"))
    if kind == "zoom":
        factor = obj.get("factor")
        if not isinstance(factor, (int, float)) or isinstance(factor, bool) or factor <= 0:
            raise ProtocolError("zoom factor must be a positive number")
        return Zoom(float(factor), _int_field(obj, "anchor"))
    if kind == "hover":
        t = obj.get("time")
        if t is not None and (isinstance(t, bool) or not isinstance(t, int)):
            raise ProtocolError("hover time must be an integer or null")
        return Hover(t)
    raise ProtocolError(f"unknown event type {kind!r}")


@dataclass
class Session:
    id: str
    dataset: dict[str, Series]
    spec: FigureSpec
    layout: ZoneLayout
    hover: int | None = None
    revision: int = 0
    width: float = DEFAULT_WIDTH
    height: float = DEFAULT_HEIGHT
    last_access: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def render(self) -> sc.Scene:
        return sc.compose(self.dataset, self.spec, self.layout,
                          self.width, self.height, self.hover)


class SessionStore:
    """In-memory sessions with lazy idle eviction; no persistence."""

    def __init__(self, idle_timeout_s: float = DEFAULT_IDLE_TIMEOUT_S, clock=time.monotonic):
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._timeout = idle_timeout_s
        self._clock = clock

    def create(self, dataset, spec, layout) -> Session:
        session = Session(id=uuid.uuid4().hex, dataset=dataset, spec=spec, layout=layout,
                          last_access=self._clock())
        with self._lock:
            self._evict()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            self._evict()
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_access = self._clock()
            return session

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None

    def _evict(self) -> None:
        cutoff = self._clock() - self._timeout
        stale = [sid for sid, s in self._sessions.items() if s.last_access < cutoff]
        for sid in stale:
            del self._sessions[sid]


def _error(status: int, code: str, detail: str, **extra) -> JSONResponse:
    body = {"error": code, "detail": detail}
    body.update(extra)
    return JSONResponse(body, status_code=status)


def _ingest_error(exc: IngestError) -> JSONResponse:
    return _error(
        400, exc.code, str(exc),
        diagnostics=[{"location": d.location, "message": d.message} for d in exc.diagnostics],
    )


def create_app(store: SessionStore | None = None) -> FastAPI:
    app = FastAPI(title="periphery-plots", version="0.1.0")
    app.state.store = store or SessionStore()

    @app.post("/sessions")
    async def create_session(request: Request):
        form = await request.form()
        if "data" not in form or "spec" not in form:
            return _error(400, "MissingField", "multipart fields 'data' and 'spec' are required")
        data_part = form["data"]
        spec_part = form["spec"]
        data = data_part if isinstance(data_part, (bytes, str)) else await data_part.read()
        if isinstance(data, str):
            data = data.encode()
        spec_text = spec_part if isinstance(spec_part, str) else (await spec_part.read()).decode()

        try:
            spec = parse_spec(spec_text)
            dataset, diagnostics = parse_csv(data, spec)
            axis = dataset_extent(dataset)
            layout = spec.initial_layout(axis)
        except IngestError as exc:
            return _ingest_error(exc)
        except TimelineError as exc:
            return _error(400, exc.code, str(exc))

        session = app.state.store.create(dataset, spec, layout)
        if "width" in form:
            session.width = float(form["width"])
        if "height" in form:
            session.height = float(form["height"])
        try:
            scene = session.render()
        except sc.TooSmallError as exc:
            app.state.store.delete(session.id)
            return _error(422, exc.code, str(exc))
        return JSONResponse({
            "id": session.id,
            "revision": session.revision,
            "scene": sc.to_json(scene),
            "diagnostics": [{"location": d.location, "message": d.message} for d in diagnostics],
        })

    @app.get("/sessions/{session_id}/scene")
    def get_scene(session_id: str, width: float | None = None, height: float | None = None,
                  format: str = "json"):
        session = app.state.store.get(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        with session.lock:
            w = width if width is not None else session.width
            h = height if height is not None else session.height
            try:
                scene = sc.compose(session.dataset, session.spec, session.layout,
                                   w, h, session.hover)
            except sc.TooSmallError as exc:
                return _error(422, exc.code, str(exc))
            session.width, session.height = w, h
            revision = session.revision
        if format == "svg":
            return Response(content=sc.to_svg(scene), media_type="image/svg+xml")
        return JSONResponse({"revision": revision, "scene": sc.to_json(scene)})

    @app.post("/sessions/{session_id}/events")
    async def post_event(session_id: str, request: Request):
        session = app.state.store.get(session_id)
        if session is None:
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        try:
            body = await request.json()
        except Exception:
            return _error(422, "MalformedEvent", "body must be JSON")
        if not isinstance(body, dict):
            return _error(422, "MalformedEvent", "body must be an object")
        expected = body.get("expected_revision")
        if isinstance(expected, bool) or not isinstance(expected, int):
            return _error(422, "MalformedEvent", "expected_revision must be an integer")
        try:
            event = event_from_json(body.get("event"))
        except ProtocolError as exc:
            return _error(422, exc.code, str(exc))

        with session.lock:
            if expected != session.revision:
                return JSONResponse({
                    "error": "RevisionConflict",
                    "detail": f"expected revision {expected}, server at {session.revision}",
                    "revision": session.revision,
                    "scene": sc.to_json(session.render()),
                }, status_code=409)
            try:
                if isinstance(event, Hover):
                    session.hover = event.time
                else:
                    session.layout = apply_event(session.layout, event)
            except (BoundaryLockedError, IndexOutOfRangeError) as exc:
                return _error(422, exc.code, str(exc))
            session.revision += 1
            scene = session.render()
            return JSONResponse({"revision": session.revision, "scene": sc.to_json(scene)})

    @app.delete("/sessions/{session_id}")
    def delete_session(session_id: str):
        if not app.state.store.delete(session_id):
            return _error(404, "UnknownSession", f"no session {session_id!r}")
        return Response(status_code=204)

    return app


app = create_app()
