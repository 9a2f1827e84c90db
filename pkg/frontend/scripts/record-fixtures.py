"""Record real API responses into tests/fixtures for the UI contract tests.

Drives the actual HTTP service (fixture provider) through the flows the
studio exercises and freezes every payload the UI consumes.

    python3 scripts/record-fixtures.py
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
import time

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
sys.path.insert(0, os.path.join(ROOT, "tests"))

from fastapi.testclient import TestClient  # noqa: E402

from corpus import (  # noqa: E402
    earth_orbit_base,
    earth_orbit_revised,
    earth_orbit_storyboard,
    generation_request,
    reply_text,
)
from sdx.gateway.fixtures import FixtureStore  # noqa: E402
from sdx.gateway.prompts import build_prompt  # noqa: E402
from sdx.gateway.providers import FixtureProvider  # noqa: E402
from sdx.service.app import make_app  # noqa: E402
from sdx.storyboard import save_storyboard, storyboard_to_jsonable  # noqa: E402
from test_acceptance import ball_guess_program  # noqa: E402
from test_clarify import CANONICAL_ITEMS, sketch_board  # noqa: E402
from test_service import _record_refinement, overlay_body  # noqa: E402

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "tests", "fixtures")


def dump(name: str, payload) -> None:
    path = os.path.join(OUT_DIR, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {name}")


def main() -> None:
    os.makedirs(OUT_DIR, exist_ok=True)
    tmp = tempfile.mkdtemp(prefix="sdx-record-")
    fixtures = FixtureStore(os.path.join(tmp, "fixtures"))
    client = TestClient(make_app(os.path.join(tmp, "data"),
                                 provider=FixtureProvider(fixtures.root)))

    # four-cue clarification flow over the canonical sketch board
    board = sketch_board()
    fixtures.record_bundle(build_prompt(generation_request(board)),
                           reply_text(ball_guess_program(), CANONICAL_ITEMS))
    pid = client.post("/projects", json={"name": "studio"}).json()["id"]
    client.put(f"/projects/{pid}/storyboard", content=save_storyboard(board))
    dump("storyboard.json", storyboard_to_jsonable(board))
    needs = client.post(f"/projects/{pid}/generate", json={}).json()
    assert needs["status"] == "needs_clarification" and len(needs["cues"]) == 4
    dump("generate-needs-clarification.json", needs)

    # ready flow + keyframes + render job + refinement over the orbit board
    orbit = earth_orbit_storyboard()
    fixtures.record_bundle(build_prompt(generation_request(orbit)),
                           reply_text(earth_orbit_base(version=1)))
    pid2 = client.post("/projects", json={"name": "orbit"}).json()["id"]
    client.put(f"/projects/{pid2}/storyboard", content=save_storyboard(orbit))
    ready = client.post(f"/projects/{pid2}/generate", json={}).json()
    assert ready["status"] == "ready"
    dump("generate-ready.json", ready)
    sid = ready["sessionId"]
    dump("keyframes.json", client.get(f"/sessions/{sid}/keyframes").json())

    job = client.post(f"/sessions/{sid}/render", json={"fps": 10}).json()
    for _ in range(200):
        job = client.get(f"/render-jobs/{job['id']}").json()
        if job["state"] in ("done", "failed"):
            break
        time.sleep(0.02)
    assert job["state"] == "done"
    dump("render-job.json", job)

    body = overlay_body(strict=True)
    _record_refinement(fixtures, orbit, earth_orbit_base(version=1),
                       earth_orbit_revised(version=2), body)
    refine = client.post(f"/sessions/{sid}/refine", json=body)
    assert refine.status_code == 200
    dump("refine-ok.json", refine.json())


if __name__ == "__main__":
    main()
