"""HTTP facade over projects, sessions, rendering and refinement.

Every UI-reachable action has an endpoint here; the service is fully
operable headlessly. Request bodies are validated by hand so schema
violations surface as 400 (422 is reserved for model replies that stay
malformed after the repair round-trip).
"""

from __future__ import annotations

import os
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse

from ..clarify import CueResolution
from ..errors import (
    CorruptStore,
    EmptyRefinement,
    FixtureMiss,
    InvalidTransition,
    LocalityViolation,
    MalformedResponse,
    ProviderUnreachable,
    SdxError,
    UnknownVersion,
)
from ..gateway.providers import Provider, provider_from_env
from ..motion.render import DEFAULT_FPS, MAX_FPS, MIN_FPS
from ..refine import (
    RefinementRequest,
    extract_keyframes,
    nearest_anchor,
    window_around,
)
from ..storyboard import load_storyboard, make_asset, storyboard_to_jsonable
from .runner import (
    apply_resolutions,
    apply_session_refinement,
    apply_skip,
    asset_resolver,
    drive_generation,
    run_render_job,
)
from .store import ProjectStore, SessionRecord

ENV_DATA_DIR = "SDX_DATA_DIR"
ENV_PORT = "SDX_PORT"

MAX_ASSET_BYTES = 1024 * 1024
RENDER_WORKERS = 4


class ApiError(Exception):
    def __init__(self, status: int, message: str):
        self.status = status
        self.message = message


class ServiceState:
    """Shared mutable state: store, live sessions, per-session locks."""

    def __init__(self, data_dir: str, provider: Optional[Provider] = None):
        self.store = ProjectStore(data_dir)
        self.provider_override = provider
        self.sessions: dict[str, SessionRecord] = {}
        self.locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self.render_pool = ThreadPoolExecutor(max_workers=RENDER_WORKERS)

    def provider(self) -> Provider:
        if self.provider_override is not None:
            return self.provider_override
        return provider_from_env()

    def session_lock(self, sid: str) -> threading.Lock:
        with self._locks_guard:
            if sid not in self.locks:
                self.locks[sid] = threading.Lock()
            return self.locks[sid]

    def session_record(self, sid: str) -> SessionRecord:
        record = self.sessions.get(sid)
        if record is None:
            record = self.store.load_session(sid)
            if record is None:
                raise ApiError(404, f"unknown session: {sid}")
            self.sessions[sid] = record
        return record


def _error_status(exc: SdxError) -> int:
    if isinstance(exc, (LocalityViolation, InvalidTransition)):
        return 409
    if isinstance(exc, (ProviderUnreachable, FixtureMiss)):
        return 502
    if isinstance(exc, MalformedResponse):
        return 422
    if isinstance(exc, CorruptStore):
        return 500
    return 400


def make_app(data_dir: Optional[str] = None, provider: Optional[Provider] = None) -> FastAPI:
    data_dir = data_dir or os.environ.get(ENV_DATA_DIR, "./sdx-data")
    state = ServiceState(data_dir, provider)
    app = FastAPI(title="sdx session service")
    app.state.service = state

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content={"error": exc.message})

    @app.exception_handler(SdxError)
    async def _sdx_error(_request: Request, exc: SdxError):
        payload: dict[str, Any] = {"error": str(exc)}
        if isinstance(exc, LocalityViolation):
            payload["localityReport"] = exc.report.jsonable()
        return JSONResponse(status_code=_error_status(exc), content=payload)

    async def _json_body(request: Request) -> Any:
        try:
            return await request.json()
        except Exception:
            raise ApiError(400, "request body must be JSON")

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok"}

    @app.post("/projects")
    async def create_project(request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict) or not isinstance(body.get("name"), str):
            raise ApiError(400, "body must be {'name': str}")
        record = state.store.create_project(body["name"])
        return {"id": record.id, "name": record.name, "createdAt": record.created_at}

    def _project(pid: str):
        record = state.store.load_project(pid)
        if record is None:
            raise ApiError(404, f"unknown project: {pid}")
        return record

    @app.get("/projects/{pid}/storyboard")
    async def get_storyboard(pid: str):
        return storyboard_to_jsonable(_project(pid).storyboard)

    @app.put("/projects/{pid}/storyboard")
    async def put_storyboard(pid: str, request: Request):
        _project(pid)
        body = await request.body()
        storyboard = load_storyboard(body.decode("utf-8"))
        state.store.save_storyboard(pid, storyboard)
        return {"ok": True, "frames": len(storyboard.frames)}

    @app.post("/projects/{pid}/assets")
    async def upload_asset(pid: str, request: Request):
        _project(pid)
        body = await _json_body(request)
        if not isinstance(body, dict) or not isinstance(body.get("svg"), str):
            raise ApiError(400, "body must be {'id'?, 'name'?, 'svg': str}")
        svg = body["svg"]
        if len(svg.encode("utf-8")) > MAX_ASSET_BYTES:
            raise ApiError(400, f"asset larger than {MAX_ASSET_BYTES} bytes")
        asset_id = str(body.get("id") or body.get("name") or "asset")
        asset = make_asset(asset_id, str(body.get("name", asset_id)), svg)
        state.store.add_asset(pid, asset)
        return {"id": asset.id, "name": asset.name, "sha256": asset.sha256}

    @app.post("/projects/{pid}/generate")
    async def generate(pid: str, request: Request):
        body = await _json_body(request) if int(request.headers.get("content-length") or 0) else {}
        if body and not isinstance(body, dict):
            raise ApiError(400, "body must be an object")
        project = _project(pid)
        if not project.storyboard.frames:
            raise ApiError(400, "storyboard has no frames")
        record = state.store.create_session(project)
        state.sessions[record.session.id] = record
        with state.session_lock(record.session.id):
            record.session.begin_generation()
            memory = state.store.memory_for(pid)
            return drive_generation(record, memory, state.provider(), state.store)

    @app.post("/sessions/{sid}/resolutions")
    async def post_resolutions(sid: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, list):
            raise ApiError(400, "body must be a JSON array of resolutions")
        resolutions = []
        for i, raw in enumerate(body):
            if not isinstance(raw, dict) or "cueId" not in raw or "answer" not in raw:
                raise ApiError(400, f"resolutions[{i}] must have cueId and answer")
            resolutions.append(CueResolution(cue_id=str(raw["cueId"]), answer=raw["answer"]))
        record = state.session_record(sid)
        with state.session_lock(sid):
            if record.session.state != "NeedsClarification":
                raise ApiError(409, f"session is {record.session.state}, not NeedsClarification")
            memory = state.store.memory_for(record.project_id)
            return apply_resolutions(record, resolutions, memory, state.provider(), state.store)

    @app.post("/sessions/{sid}/cues/{cue_id}/skip")
    async def post_skip(sid: str, cue_id: str):
        record = state.session_record(sid)
        with state.session_lock(sid):
            if record.session.state != "NeedsClarification":
                raise ApiError(409, f"session is {record.session.state}, not NeedsClarification")
            memory = state.store.memory_for(record.project_id)
            return apply_skip(record, cue_id, memory, state.provider(), state.store)

    @app.get("/sessions/{sid}/program")
    async def get_program(sid: str, version: Optional[int] = None):
        record = state.session_record(sid)
        count = len(record.session.program_versions)
        if count == 0:
            raise ApiError(404, "session has no program yet")
        n = version if version is not None else count
        if not (1 <= n <= count):
            raise ApiError(404, f"unknown version {n} (have 1..{count})")
        text = state.store.program_version_text(sid, n)
        return Response(content=text, media_type="application/json")

    @app.post("/sessions/{sid}/render")
    async def post_render(sid: str, request: Request):
        body = await _json_body(request)
        if not isinstance(body, dict):
            raise ApiError(400, "body must be an object")
        fps = body.get("fps", DEFAULT_FPS)
        if not isinstance(fps, int) or isinstance(fps, bool) or not (MIN_FPS <= fps <= MAX_FPS):
            raise ApiError(400, f"fps must be an integer in [{MIN_FPS}, {MAX_FPS}]")
        record = state.session_record(sid)
        with state.session_lock(sid):
            count = len(record.session.program_versions)
            if count == 0:
                raise ApiError(409, "session has no program to render")
            version = body.get("programVersion", count)
            if not (isinstance(version, int) and 1 <= version <= count):
                raise ApiError(404, f"unknown version {version}")
            job = state.store.create_job(sid, version, fps)
        state.render_pool.submit(run_render_job, state.store, job, record, 1)
        return job.jsonable()

    @app.get("/render-jobs/{jid}")
    async def get_job(jid: str):
        job = state.store.load_job(jid)
        if job is None:
            raise ApiError(404, f"unknown render job: {jid}")
        return job.jsonable()

    @app.get("/render-jobs/{jid}/frames/{name}")
    async def get_job_frame(jid: str, name: str):
        import re

        if state.store.load_job(jid) is None:
            raise ApiError(404, f"unknown render job: {jid}")
        if not re.fullmatch(r"frame_\d{5}\.svg|manifest\.json", name):
            raise ApiError(404, f"unknown frame file: {name}")
        path = os.path.join(state.store.job_frames_dir(jid), name)
        if not os.path.exists(path):
            raise ApiError(404, f"frame not rendered: {name}")
        with open(path, "r", encoding="utf-8") as fh:
            content = fh.read()
        media = "image/svg+xml" if name.endswith(".svg") else "application/json"
        return Response(content=content, media_type=media)

    @app.get("/sessions/{sid}/keyframes")
    async def get_keyframes(sid: str, version: Optional[int] = None):
        record = state.session_record(sid)
        count = len(record.session.program_versions)
        if count == 0:
            raise ApiError(404, "session has no program yet")
        n = version if version is not None else count
        if not (1 <= n <= count):
            raise ApiError(404, f"unknown version {n}")
        program = record.session.program_versions[n - 1]
        anchors = extract_keyframes(program, render_frames=False)
        return {
            "programVersion": n,
            "anchors": [
                {
                    "timestamp": a.timestamp,
                    "reasons": list(a.reasons),
                    "sourceActionIds": list(a.source_action_ids),
                    "frameUrl": f"/sessions/{sid}/keyframe-frames/{n}/{i}.svg",
                }
                for i, a in enumerate(anchors)
            ],
        }

    @app.get("/sessions/{sid}/keyframe-frames/{version}/{index}.svg")
    async def get_keyframe_frame(sid: str, version: int, index: int):
        record = state.session_record(sid)
        count = len(record.session.program_versions)
        if not (1 <= version <= count):
            raise ApiError(404, f"unknown version {version}")
        program = record.session.program_versions[version - 1]
        anchors = extract_keyframes(program, assets=asset_resolver(record.storyboard))
        if not (0 <= index < len(anchors)):
            raise ApiError(404, f"unknown keyframe index {index}")
        return Response(content=anchors[index].frame_svg, media_type="image/svg+xml")

    @app.post("/sessions/{sid}/refine")
    async def post_refine(sid: str, request: Request):
        body = await _json_body(request)
        record = state.session_record(sid)
        with state.session_lock(sid):
            if record.session.state != "Ready":
                raise ApiError(409, f"session is {record.session.state}, not Ready")
            req = _refinement_from_body(body, record)
            try:
                program, report = apply_session_refinement(
                    record, req, state.provider(), store=state.store)
            except LocalityViolation as exc:
                state.store.save_session(record)
                return JSONResponse(status_code=409, content={
                    "error": "locality violated",
                    "localityReport": exc.report.jsonable(),
                })
            return {"programVersion": program.version, "localityReport": report.jsonable()}

    def _refinement_from_body(body: Any, record: SessionRecord) -> RefinementRequest:
        if not isinstance(body, dict):
            raise ApiError(400, "body must be an object")
        count = len(record.session.program_versions)
        version = body.get("baseProgramVersion", count)
        if not (isinstance(version, int) and 1 <= version <= count):
            raise UnknownVersion(f"unknown base version {version}")
        anchor_raw = body.get("anchor")
        if not isinstance(anchor_raw, dict) or "timestamp" not in anchor_raw:
            raise ApiError(400, "anchor must be {'timestamp': seconds}")
        timestamp = float(anchor_raw["timestamp"])
        program = record.session.program_versions[version - 1]
        anchors = extract_keyframes(program, assets=asset_resolver(record.storyboard))
        anchor = nearest_anchor(anchors, timestamp)
        if "window" in body:
            w = body["window"]
            if not (isinstance(w, list) and len(w) == 2):
                raise ApiError(400, "window must be [t1, t2]")
            window = (float(w[0]), float(w[1]))
        else:
            half = float(body.get("windowHalfWidth", 2.0))
            window = window_around(anchor.timestamp, half)
        strokes = []
        for i, raw in enumerate(body.get("overlayStrokes", [])):
            from ..storyboard import Stroke

            pts = tuple((float(x), float(y)) for x, y in raw.get("points", []))
            if len(pts) < 2:
                raise ApiError(400, f"overlayStrokes[{i}] needs at least 2 points")
            color = tuple(float(c) for c in raw.get("color", (1, 0, 0, 1)))
            strokes.append(Stroke(points=pts, color=color,
                                  width=float(raw.get("width", 4.0)),
                                  seq=int(raw.get("seq", i))))
        text = str(body.get("text", ""))
        if not strokes and not text:
            raise EmptyRefinement("refinement needs overlayStrokes or text")
        return RefinementRequest(
            session_id=record.session.id,
            base_version=version,
            anchor=anchor,
            window=window,
            overlay_strokes=tuple(strokes),
            text=text,
            strict=bool(body.get("strict", False)),
        )

    return app


def main() -> None:  # pragma: no cover - thin uvicorn launcher
    import uvicorn

    port = int(os.environ.get(ENV_PORT, "8600"))
    uvicorn.run(make_app(), host="127.0.0.1", port=port)
