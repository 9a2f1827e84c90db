"""File-backed project/session/job persistence.

Layout under the data directory:

    projects/<pid>.json          project record with storyboard + assets
    projects/<pid>.memory.jsonl  intent disambiguation memory
    session/<sid>.json           session record (storyboard snapshotted)
    session/<sid>/v<N>.ms.json   program versions, append-only
    jobs/<jid>.json              render job records
    jobs/<jid>/frames/           rendered output

All writes go through a temp file + rename, so a crash mid-write leaves
the previous consistent state; loaders ignore stray ``*.tmp`` files.
"""

from __future__ import annotations

import json
import os
import time
import uuid
from dataclasses import dataclass
from typing import Any, Optional

from ..clarify import (
    CueResolution,
    DisambiguationMemory,
    GenerationSession,
    cue_from_jsonable,
    cue_jsonable,
)
from ..errors import CorruptStore, ValidationError
from ..gateway.types import ResolutionNote
from ..motion.model import MotionProgram
from ..motion.parser import parse, print_program
from ..storyboard import (
    AssetRef,
    Storyboard,
    load_storyboard,
    save_storyboard,
    storyboard_to_jsonable,
)


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _new_id(prefix: str) -> str:
    return f"{prefix}-{uuid.uuid4().hex[:12]}"


@dataclass
class ProjectRecord:
    id: str
    name: str
    storyboard: Storyboard
    created_at: float
    updated_at: float


@dataclass
class SessionRecord:
    session: GenerationSession
    project_id: str
    storyboard: Storyboard  # snapshot taken when the session was created


@dataclass
class RenderJob:
    id: str
    session_id: str
    program_version: int
    fps: int
    state: str = "queued"  # queued | running | done | failed
    error: str = ""
    manifest: Optional[dict] = None

    def jsonable(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "id": self.id,
            "sessionId": self.session_id,
            "programVersion": self.program_version,
            "fps": self.fps,
            "state": self.state,
        }
        if self.error:
            out["error"] = self.error
        if self.manifest is not None:
            out["manifest"] = self.manifest
        return out


class ProjectStore:
    def __init__(self, data_dir):
        self.root = str(data_dir)
        for sub in ("projects", "session", "jobs"):
            os.makedirs(os.path.join(self.root, sub), exist_ok=True)

    # -- paths --

    def _project_path(self, pid: str) -> str:
        return os.path.join(self.root, "projects", f"{pid}.json")

    def memory_path(self, pid: str) -> str:
        return os.path.join(self.root, "projects", f"{pid}.memory.jsonl")

    def _session_path(self, sid: str) -> str:
        return os.path.join(self.root, "session", f"{sid}.json")

    def _version_path(self, sid: str, version: int) -> str:
        return os.path.join(self.root, "session", sid, f"v{version}.ms.json")

    def _job_path(self, jid: str) -> str:
        return os.path.join(self.root, "jobs", f"{jid}.json")

    def job_frames_dir(self, jid: str) -> str:
        return os.path.join(self.root, "jobs", jid, "frames")

    # -- projects --

    def create_project(self, name: str) -> ProjectRecord:
        now = time.time()
        record = ProjectRecord(
            id=_new_id("proj"), name=name,
            storyboard=Storyboard(id=_new_id("sb"), frames=()),
            created_at=now, updated_at=now,
        )
        self._save_project(record)
        return record

    def _save_project(self, record: ProjectRecord) -> None:
        payload = {
            "id": record.id,
            "name": record.name,
            "createdAt": record.created_at,
            "updatedAt": record.updated_at,
            "storyboard": storyboard_to_jsonable(record.storyboard),
        }
        _atomic_write_text(self._project_path(record.id),
                           json.dumps(payload, sort_keys=True, indent=2))

    def load_project(self, pid: str) -> Optional[ProjectRecord]:
        path = self._project_path(pid)
        if not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
            storyboard = load_storyboard(json.dumps(raw["storyboard"]))
            return ProjectRecord(
                id=raw["id"], name=raw.get("name", raw["id"]),
                storyboard=storyboard,
                created_at=float(raw.get("createdAt", 0.0)),
                updated_at=float(raw.get("updatedAt", 0.0)),
            )
        except (KeyError, ValueError, ValidationError) as exc:
            raise CorruptStore(path, f"project record invalid: {exc}")

    def save_storyboard(self, pid: str, storyboard: Storyboard) -> ProjectRecord:
        record = self.load_project(pid)
        if record is None:
            raise KeyError(pid)
        record.storyboard = storyboard
        record.updated_at = time.time()
        self._save_project(record)
        return record

    def add_asset(self, pid: str, asset: AssetRef) -> ProjectRecord:
        record = self.load_project(pid)
        if record is None:
            raise KeyError(pid)
        others = tuple(a for a in record.storyboard.assets if a.id != asset.id)
        record.storyboard = Storyboard(
            id=record.storyboard.id, frames=record.storyboard.frames,
            canvas_size=record.storyboard.canvas_size, assets=others + (asset,),
        )
        record.updated_at = time.time()
        self._save_project(record)
        return record

    def memory_for(self, pid: str) -> DisambiguationMemory:
        return DisambiguationMemory(self.memory_path(pid))

    # -- sessions --

    def create_session(self, project: ProjectRecord) -> SessionRecord:
        sb_text = save_storyboard(project.storyboard)
        import hashlib

        session = GenerationSession(
            id=_new_id("sess"),
            storyboard_version=hashlib.sha256(sb_text.encode("utf-8")).hexdigest(),
        )
        record = SessionRecord(session=session, project_id=project.id,
                               storyboard=project.storyboard)
        self.save_session(record)
        return record

    def save_session(self, record: SessionRecord) -> None:
        s = record.session
        payload = {
            "id": s.id,
            "projectId": record.project_id,
            "storyboardVersion": s.storyboard_version,
            "state": s.state,
            "failure": s.failure,
            "pending": [cue_jsonable(c) for c in s.pending.values()],
            "resolved": [{"cueId": r.cue_id, "answer": r.answer} for r in s.resolved],
            "resolutionNotes": [{"cueId": n.cue_id, "text": n.text}
                                for n in s.resolution_notes],
            "skippedKeys": sorted(s.skipped_keys),
            "versionCount": len(s.program_versions),
            "storyboard": storyboard_to_jsonable(record.storyboard),
        }
        _atomic_write_text(self._session_path(s.id),
                           json.dumps(payload, sort_keys=True, indent=2))

    def load_session(self, sid: str) -> Optional[SessionRecord]:
        path = self._session_path(sid)
        if not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
            storyboard = load_storyboard(json.dumps(raw["storyboard"]))
            session = GenerationSession(
                id=raw["id"],
                storyboard_version=raw.get("storyboardVersion", ""),
                state=raw["state"],
                failure=raw.get("failure", ""),
            )
            for cue_raw in raw.get("pending", []):
                cue = cue_from_jsonable(cue_raw)
                session.pending[cue.id] = cue
            session.resolved = [CueResolution(cue_id=r["cueId"], answer=r["answer"])
                                for r in raw.get("resolved", [])]
            session.resolution_notes = [
                ResolutionNote(cue_id=n["cueId"], text=n["text"])
                for n in raw.get("resolutionNotes", [])
            ]
            session.skipped_keys = set(raw.get("skippedKeys", []))
            count = int(raw.get("versionCount", 0))
            session.program_versions = [
                self.load_program_version(sid, v) for v in range(1, count + 1)
            ]
            if session.state not in ("Drafting", "Generating", "NeedsClarification",
                                     "Ready", "Failed"):
                raise ValueError(f"unknown state {session.state}")
            return SessionRecord(session=session, project_id=raw["projectId"],
                                 storyboard=storyboard)
        except (KeyError, ValueError, ValidationError) as exc:
            raise CorruptStore(path, f"session record invalid: {exc}")

    def append_program_version(self, sid: str, program: MotionProgram) -> None:
        """Write v<N>.ms.json; an existing version file is never rewritten."""
        path = self._version_path(sid, program.version)
        if os.path.exists(path):
            raise CorruptStore(path, "version file already exists; history is append-only")
        os.makedirs(os.path.dirname(path), exist_ok=True)
        _atomic_write_text(path, print_program(program))

    def load_program_version(self, sid: str, version: int) -> MotionProgram:
        path = self._version_path(sid, version)
        if not os.path.exists(path):
            raise KeyError(f"session {sid} has no version {version}")
        with open(path, "r", encoding="utf-8") as fh:
            return parse(fh.read())

    def program_version_text(self, sid: str, version: int) -> str:
        path = self._version_path(sid, version)
        if not os.path.exists(path):
            raise KeyError(f"session {sid} has no version {version}")
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()

    # -- render jobs --

    def create_job(self, session_id: str, program_version: int, fps: int) -> RenderJob:
        job = RenderJob(id=_new_id("job"), session_id=session_id,
                        program_version=program_version, fps=fps)
        self.save_job(job)
        return job

    def save_job(self, job: RenderJob) -> None:
        _atomic_write_text(self._job_path(job.id),
                           json.dumps(job.jsonable(), sort_keys=True, indent=2))

    def load_job(self, jid: str) -> Optional[RenderJob]:
        path = self._job_path(jid)
        if not os.path.exists(path):
            return None
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
            return RenderJob(
                id=raw["id"], session_id=raw["sessionId"],
                program_version=int(raw["programVersion"]), fps=int(raw["fps"]),
                state=raw.get("state", "queued"), error=raw.get("error", ""),
                manifest=raw.get("manifest"),
            )
        except (KeyError, ValueError) as exc:
            raise CorruptStore(path, f"job record invalid: {exc}")
