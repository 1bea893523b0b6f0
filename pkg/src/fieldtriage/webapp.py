"""HTTP surface of the command server: report intake, victim board, SSE feed.

Endpoints:
  POST /api/reports                submit a victim report (idempotent)
  GET  /api/victims                most-severe-first board, optional filters
  POST /api/victims/{id}/status    responder workflow transition
  GET  /api/events?since=N         server-sent events, replay then live
Optionally serves a static dashboard bundle at /.
"""

from __future__ import annotations

import json
import socket

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .errors import ConflictError, DataError, NotFoundError
from .server import STATUSES, VictimRegistry

DEFAULT_KEEPALIVE_S = 15.0


def _sse_frame(event) -> str:
    payload = json.dumps(event.as_dict(), sort_keys=True)
    return f"id: {event.event_id}\nevent: {event.kind}\ndata: {payload}\n\n"


def create_app(registry: VictimRegistry, static_dir: str | None = None,
               keepalive_s: float = DEFAULT_KEEPALIVE_S) -> FastAPI:
    app = FastAPI(title="field triage command server")
    app.state.registry = registry

    @app.exception_handler(DataError)
    async def _bad_request(_request, exc: DataError):
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.exception_handler(NotFoundError)
    async def _not_found(_request, exc: NotFoundError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ConflictError)
    async def _conflict(_request, exc: ConflictError):
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.post("/api/reports")
    async def submit_report(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise DataError(f"request body is not valid JSON: {exc}") from exc
        victim_id = registry.submit_report(body)
        return {"victim_id": victim_id}

    @app.get("/api/victims")
    async def list_victims(status: str | None = None, acuity: int | None = None):
        if status is not None and status not in STATUSES:
            raise DataError(f"unknown status {status!r}")
        if acuity is not None and not 1 <= acuity <= 5:
            raise DataError(f"acuity filter out of range: {acuity}")
        return [entry.as_dict() for entry in registry.list_victims(status, acuity)]

    @app.post("/api/victims/{victim_id}/status")
    async def update_status(victim_id: str, request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError as exc:
            raise DataError(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict) or not isinstance(body.get("status"), str) \
                or not isinstance(body.get("responder"), str):
            raise DataError("body must be {\"status\": ..., \"responder\": ...}")
        entry = registry.update_status(victim_id, body["status"], body["responder"])
        return entry.as_dict()

    @app.get("/api/events")
    async def event_stream(since: int = 0):
        def frames():
            # sync generator: starlette drives it from a worker thread, so
            # blocking waits inside the registry are fine here
            for event in registry.events_since(since, timeout_s=keepalive_s):
                if event is None:
                    yield ": keepalive\n\n"
                else:
                    yield _sse_frame(event)

        return StreamingResponse(frames(), media_type="text/event-stream",
                                 headers={"Cache-Control": "no-cache",
                                          "X-Accel-Buffering": "no"})

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="dashboard")
    return app


def serve(registry: VictimRegistry, host: str = "127.0.0.1", port: int = 8000,
          static_dir: str | None = None,
          keepalive_s: float = DEFAULT_KEEPALIVE_S) -> None:
    """Run the server in the foreground; prints the bound address once ready.

    The socket is bound before uvicorn starts so that port 0 (pick any free
    port) still lets us announce the real address, and it is listening before
    the banner prints so a caller may connect the moment the line appears
    (the kernel queues connections until uvicorn begins accepting).
    """
    import uvicorn

    app = create_app(registry, static_dir=static_dir, keepalive_s=keepalive_s)
    sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    sock.bind((host, port))
    sock.listen(128)
    bound_host, bound_port = sock.getsockname()
    print(f"serving on http://{bound_host}:{bound_port}", flush=True)
    config = uvicorn.Config(app, log_level="warning", access_log=False)
    try:
        uvicorn.Server(config).run(sockets=[sock])
    finally:
        registry.close()
