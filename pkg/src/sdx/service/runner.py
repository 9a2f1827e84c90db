"""Drives generation sessions and render jobs against a provider."""

from __future__ import annotations

from typing import Any, Optional

from ..clarify import CueResolution, DisambiguationMemory, cue_jsonable
from ..errors import SdxError
from ..gateway.invoke import invoke
from ..gateway.prompts import build_prompt
from ..gateway.providers import Provider
from ..gateway.types import GenerationRequest
from ..motion.grammar import GRAMMAR_DIGEST
from ..motion.render import render_sequence, write_frameset
from ..refine import RefinementRequest, refine_program
from ..storyboard import Storyboard, composite_storyboard
from .store import ProjectStore, RenderJob, SessionRecord

# Bound on regenerate rounds per client call: memory auto-application can
# legitimately trigger one extra pass, anything beyond a few is a fixture
# or provider cycle.
MAX_GENERATION_ROUNDS = 5


def request_for(storyboard: Storyboard, session, provider_id: str) -> GenerationRequest:
    composite = composite_storyboard(storyboard)
    return GenerationRequest(
        composite=composite,
        scripts=tuple(f.script for f in storyboard.frames),
        grammar_digest=GRAMMAR_DIGEST,
        resolutions=session.notes(),
        provider_id=provider_id,
    )


def asset_resolver(storyboard: Storyboard):
    table = {a.id: a.svg for a in storyboard.assets}
    return table.get


def drive_generation(record: SessionRecord, memory: DisambiguationMemory,
                     provider: Provider, store: Optional[ProjectStore] = None) -> dict[str, Any]:
    """Generate (and regenerate) until the session needs input or is Ready.

    Returns the wire-shaped status payload used by both HTTP and CLI.
    """
    session = record.session
    storyboard = record.storyboard
    composite = composite_storyboard(storyboard)

    rounds = 0
    while session.state == "Generating":
        rounds += 1
        if rounds > MAX_GENERATION_ROUNDS:
            session.fail(f"no progress after {MAX_GENERATION_ROUNDS} generation rounds")
            if store is not None:
                store.save_session(record)
            raise SdxError(session.failure)
        request = request_for(storyboard, session, provider.id)
        bundle = build_prompt(request)
        try:
            response = invoke(bundle, provider)
        except SdxError:
            session.fail("provider invocation failed")
            if store is not None:
                store.save_session(record)
            raise
        notes_before = len(session.resolution_notes)
        session.surface_cues(response.ambiguities, storyboard, composite, memory)
        if session.state == "NeedsClarification":
            break
        if len(session.resolution_notes) == notes_before:
            # nothing new to tell the model; this response is the answer
            program = session.complete(response.program)
            if store is not None:
                store.append_program_version(session.id, program)
            break
        # new memory-injected notes: loop and regenerate with them

    if store is not None:
        store.save_session(record)
    return session_status(record)


def session_status(record: SessionRecord) -> dict[str, Any]:
    session = record.session
    payload: dict[str, Any] = {
        "sessionId": session.id,
        "status": {
            "Ready": "ready",
            "NeedsClarification": "needs_clarification",
            "Failed": "failed",
        }.get(session.state, session.state.lower()),
        "cues": [cue_jsonable(c) for c in session.pending.values()],
    }
    if session.program_versions:
        payload["programVersion"] = len(session.program_versions)
    if session.failure:
        payload["failure"] = session.failure
    return payload


def apply_resolutions(record: SessionRecord, resolutions: list[CueResolution],
                      memory: DisambiguationMemory, provider: Provider,
                      store: Optional[ProjectStore] = None) -> dict[str, Any]:
    for resolution in resolutions:
        record.session.resolve(resolution, memory)
    if record.session.state == "Generating":
        return drive_generation(record, memory, provider, store)
    if store is not None:
        store.save_session(record)
    return session_status(record)


def apply_skip(record: SessionRecord, cue_id: str,
               memory: DisambiguationMemory, provider: Provider,
               store: Optional[ProjectStore] = None) -> dict[str, Any]:
    record.session.skip(cue_id)
    if record.session.state == "Generating":
        return drive_generation(record, memory, provider, store)
    if store is not None:
        store.save_session(record)
    return session_status(record)


def apply_session_refinement(record: SessionRecord, req: RefinementRequest,
                             provider: Provider, fps: int = 30,
                             store: Optional[ProjectStore] = None):
    """Refine the session's latest (or requested) version; on pass/warn the
    revised program becomes the next version."""
    session = record.session
    base = session.program_versions[req.base_version - 1]
    template = request_for(record.storyboard, session, provider.id)
    resolver = asset_resolver(record.storyboard)
    revised, report = refine_program(base, req, template, provider,
                                     fps=fps, assets=resolver)
    versioned = session.append_version(revised)
    if store is not None:
        store.append_program_version(session.id, versioned)
        store.save_session(record)
    return versioned, report


def run_render_job(store: ProjectStore, job: RenderJob, record: SessionRecord,
                   workers: int = 1) -> RenderJob:
    job.state = "running"
    store.save_job(job)
    try:
        program = record.session.program_versions[job.program_version - 1]
        frameset = render_sequence(program, job.fps,
                                   assets=asset_resolver(record.storyboard),
                                   workers=workers)
        manifest = write_frameset(frameset, store.job_frames_dir(job.id))
        job.manifest = manifest
        job.state = "done"
    except Exception as exc:  # job state must reach a terminal value
        job.state = "failed"
        job.error = str(exc)
    store.save_job(job)
    return job
