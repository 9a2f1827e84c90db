"""HTTP service, persistence and session drivers."""

from .app import ENV_DATA_DIR, ENV_PORT, make_app
from .runner import (
    apply_resolutions,
    apply_session_refinement,
    apply_skip,
    drive_generation,
    request_for,
    session_status,
)
from .store import ProjectStore, RenderJob, SessionRecord

__all__ = [
    "ENV_DATA_DIR",
    "ENV_PORT",
    "ProjectStore",
    "RenderJob",
    "SessionRecord",
    "apply_resolutions",
    "apply_session_refinement",
    "apply_skip",
    "drive_generation",
    "make_app",
    "request_for",
    "session_status",
]
