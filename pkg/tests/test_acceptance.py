"""Acceptance suite: one test per release criterion, each at its stated
tolerance. Run with ``pytest tests/test_acceptance.py -s`` to see the
per-criterion pass lines."""

from __future__ import annotations

import hashlib
import json
import os
import random
import subprocess
import sys
import time
from dataclasses import replace

import pytest

from corpus import (
    earth_orbit_bad_revision,
    earth_orbit_base,
    earth_orbit_revised,
    earth_orbit_storyboard,
    generation_request,
    install_traffic_light_generation,
    install_traffic_light_refinement,
    orbit_overlay_strokes,
    reply_text,
    traffic_light_program,
    traffic_light_refined_program,
    traffic_light_storyboard,
)
from oracle import FrameStepper, compare_entity_states, random_program_jsonable
from sdx.clarify import (
    ALLOWED_TRANSITIONS,
    CueResolution,
    DisambiguationMemory,
    GenerationSession,
)
from sdx.errors import LocalityViolation, ProgramSyntaxError, ValidationError
from sdx.gateway.fixtures import FixtureStore
from sdx.gateway.prompts import build_prompt
from sdx.gateway.providers import FixtureProvider
from sdx.motion.engine import evaluate_at
from sdx.motion.parser import from_jsonable, parse, print_program
from sdx.motion.render import frame_count_for, render_sequence
from sdx.refine import (
    RefinementRequest,
    build_refinement_context,
    extract_keyframes,
    frames_equal_outside_window,
    nearest_anchor,
    validate_locality,
)
from sdx.service.runner import (
    apply_resolutions,
    apply_session_refinement,
    drive_generation,
)
from sdx.service.store import SessionRecord
from sdx.storyboard import composite_storyboard, save_storyboard
from test_clarify import CANONICAL_ANSWERS, CANONICAL_ITEMS, sketch_board

TOLERANCE = 1e-9
SAMPLE_FPS = 30


def passed(name: str) -> None:
    print(f"\n[ACCEPTANCE] {name}: PASS")


# --- criterion 1: DSL oracle equivalence ---------------------------------------


def test_dsl_oracle_equivalence_200_programs():
    """Brute-force stepper and closed-form evaluator agree within 1e-9 per
    scalar channel at every 1/30 s sample, for 200 randomized programs."""
    rng = random.Random(20240917)
    started = time.monotonic()
    checked_samples = 0
    for trial in range(200):
        program = from_jsonable(random_program_jsonable(rng, max_entities=10,
                                                        max_actions=20))
        stepper = FrameStepper(program)
        for i in range(frame_count_for(program.total_duration(), SAMPLE_FPS)):
            t = i / SAMPLE_FPS
            expected = stepper.step_to(t)
            actual = evaluate_at(program, t)
            checked_samples += 1
            for name, channels in expected.items():
                problems = compare_entity_states(name, channels,
                                                 actual.entities[name], tol=TOLERANCE)
                assert not problems, f"trial {trial} t={t}: {problems}"
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"oracle equivalence took {elapsed:.1f}s (budget 60s)"
    assert checked_samples > 10_000
    passed(f"DSL oracle equivalence (200 programs, {checked_samples} samples, "
           f"{elapsed:.1f}s)")


# --- criterion 2: parser round-trip ----------------------------------------------


INVALID_PROGRAM_FIXTURES = [
    # (program text mutation, expected error type, expected location)
    ('{"entities": [], "timeline": [{"id": "x", "entityId": "ghost", '
     '"kind": "translate", "to": [0, 0], "start": 0, "duration": 1, '
     '"easing": "linear", "repeat": 1}], "version": 0}',
     ValidationError, "/timeline/0/entityId"),
    ('{"entities": [{"id": "c", "kind": "circle", "geometry": {"radius": 5}}], '
     '"timeline": [{"id": "x", "entityId": "c", "kind": "translate", "to": [0, 0], '
     '"start": 0, "duration": -1, "easing": "linear", "repeat": 1}], "version": 0}',
     ValidationError, "/timeline/0/duration"),
    ('{"entities": [{"id": "c", "kind": "circle", "geometry": {"radius": 5}, '
     '"style": {"opacity": 1.5}}], "timeline": [], "version": 0}',
     ValidationError, "/entities/0/style/opacity"),
    ('{"entities": [{"id": "c", "kind": "circle", "geometry": {"radius": 5}}], '
     '"timeline": [{"id": "x", "entityId": "c", "kind": "translate", "to": [0, 0], '
     '"start": 0, "duration": 1, "easing": "wobble", "repeat": 1}], "version": 0}',
     ValidationError, "/timeline/0/easing"),
    ('{"entities": [{"id": "c", "kind": "circle", "geometry": {"radius": 5}}], '
     '"timeline": [{"id": "x", "entityId": "c", "kind": "translate", "to": [0, 0], '
     '"start": 0, "duration": 1, "easing": "linear", "repeat": 0}], "version": 0}',
     ValidationError, "/timeline/0/repeat"),
    ('{"entities": [{"id": "c", "kind": "circle", "geometry": {"radius": -1}}], '
     '"timeline": [], "version": 0}',
     ValidationError, "/entities/0/geometry/radius"),
    ("{broken json", ProgramSyntaxError, None),
    ('["not", "an", "object"]', ValidationError, ""),
]


def test_parser_roundtrip_1000_programs_and_error_pointers():
    rng = random.Random(77001)
    for _ in range(1000):
        program = from_jsonable(random_program_jsonable(rng))
        assert parse(print_program(program)) == program

    for text, error_type, location in INVALID_PROGRAM_FIXTURES:
        with pytest.raises(error_type) as err:
            parse(text)
        if location is not None:
            assert err.value.location == location, \
                f"expected pointer {location}, got {err.value.location}"
    passed("parser round-trip (1000 programs) and error location pointers")


# --- criterion 3: clarification mapping and memory -------------------------------


class RecordingProvider:
    """Fixture playback that also keeps every bundle it served."""

    id = "fixture"

    def __init__(self, root):
        self.inner = FixtureProvider(root)
        self.bundles = []

    def complete(self, bundle):
        self.bundles.append(bundle)
        return self.inner.complete(bundle)


def ball_guess_program():
    return from_jsonable({
        "entities": [
            {"id": "ball", "kind": "circle", "geometry": {"radius": 60.0},
             "style": {"fill": [0.2, 0.4, 0.9, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [300.0, 400.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}}],
        "timeline": [
            {"id": "roll", "entityId": "ball", "kind": "translate",
             "alongPath": [[300.0, 400.0], [1200.0, 400.0]],
             "start": 0.0, "duration": 2.0, "easing": "easeInOut", "repeat": 1}],
        "version": 0,
    })


def test_clarification_mapping_and_memory_suppression(tmp_path):
    storyboard = sketch_board()
    fixtures = FixtureStore(tmp_path / "fixtures")

    # record generation passes: first with the four canonical ambiguities,
    # then (with all four resolutions attached) a clean reply
    from corpus import expected_notes

    answers_by_id = {item["id"]: CANONICAL_ANSWERS[item["id"]] for item in CANONICAL_ITEMS}
    bundle0 = build_prompt(generation_request(storyboard))
    fixtures.record_bundle(bundle0, reply_text(ball_guess_program(), CANONICAL_ITEMS))
    notes = expected_notes(storyboard, CANONICAL_ITEMS, answers_by_id)
    bundle1 = build_prompt(generation_request(storyboard, notes))
    fixtures.record_bundle(bundle1, reply_text(ball_guess_program()))

    provider = RecordingProvider(fixtures.root)
    memory = DisambiguationMemory(tmp_path / "memory.jsonl")

    # session 1: four cues at the right levels, answered one by one
    session1 = GenerationSession(id="s1", storyboard_version="v")
    record1 = SessionRecord(session=session1, project_id="p", storyboard=storyboard)
    session1.begin_generation()
    status = drive_generation(record1, memory, provider)
    assert status["status"] == "needs_clarification"
    levels = {c["id"]: c["level"] for c in status["cues"]}
    assert levels == {
        "q-line": "quick_confirm",
        "q-arrow": "multiple_choice",
        "q-duration": "fill_value",
        "q-star": "text_or_upload",
    }
    option_labels = [o["label"] for c in status["cues"] if c["id"] == "q-arrow"
                     for o in c["payload"]["options"]]
    assert option_labels == ["rotation", "decorative arrow"]
    parameter = next(c for c in status["cues"] if c["id"] == "q-duration")
    assert parameter["payload"]["parameter"]["unit"] == "s"

    resolutions = [CueResolution(cue_id=c["id"], answer=answers_by_id[c["id"]])
                   for c in status["cues"]]
    status = apply_resolutions(record1, resolutions, memory, provider)
    assert status["status"] == "ready"

    # session 2 over the unchanged sketches: zero repeat cues, and the
    # regeneration prompt carries every stored resolution verbatim
    calls_before = len(provider.bundles)
    session2 = GenerationSession(id="s2", storyboard_version="v")
    record2 = SessionRecord(session=session2, project_id="p", storyboard=storyboard)
    session2.begin_generation()
    status = drive_generation(record2, memory, provider)
    assert status["status"] == "ready"
    assert status["cues"] == []

    regen_bundle = provider.bundles[-1]
    assert len(provider.bundles) == calls_before + 2
    for note in notes:
        assert note.text in regen_bundle.user_text, f"missing resolution: {note.text}"
    assert "duration of ball path = 2 s" in regen_bundle.user_text
    for entry in memory.entries.values():
        assert entry.hit_count == 2  # created once, reused once
    passed("clarification mapping and memory suppression (4 canonical cues)")


# --- criterion 4: refinement locality ----------------------------------------------


def ready_session(storyboard, program) -> SessionRecord:
    session = GenerationSession(id="accept", storyboard_version="v")
    record = SessionRecord(session=session, project_id="p", storyboard=storyboard)
    session.begin_generation()
    session.complete(program)
    return record


def record_session_refinement(fixtures, storyboard, base, revised, request):
    context = build_refinement_context(base, request, fps=SAMPLE_FPS,
                                       assets={}.get)
    bundle = build_prompt(replace(generation_request(storyboard), refinement=context))
    fixtures.record_bundle(bundle, reply_text(revised))


def test_refinement_locality_reject_and_stability(tmp_path):
    fixtures = FixtureStore(tmp_path / "fixtures")
    storyboard = earth_orbit_storyboard()
    base = earth_orbit_base(version=1)
    anchors = extract_keyframes(base, fps=SAMPLE_FPS, render_frames=False)

    # strict reject: offenders are exactly the hand-enumerated ids and the
    # session history stays untouched
    reject_request = RefinementRequest(
        session_id="accept", base_version=1,
        anchor=nearest_anchor(anchors, 2.0), window=(0.5, 3.5),
        text="the earth moves along the ring", strict=True)
    record_session_refinement(fixtures, storyboard, base,
                              earth_orbit_bad_revision(version=2), reject_request)
    record = ready_session(storyboard, base)
    provider = FixtureProvider(fixtures.root)
    with pytest.raises(LocalityViolation) as err:
        apply_session_refinement(record, reject_request, provider, fps=SAMPLE_FPS)
    assert err.value.report.offenders == frozenset({"sun-glow"})
    assert len(record.session.program_versions) == 1  # nothing appended

    # earth-orbit pass: version appended, frames outside the window identical
    pass_request = RefinementRequest(
        session_id="accept", base_version=1,
        anchor=nearest_anchor(anchors, 2.0), window=(0.5, 3.5),
        overlay_strokes=orbit_overlay_strokes(), strict=True)
    record_session_refinement(fixtures, storyboard, base,
                              earth_orbit_revised(version=2), pass_request)
    revised, report = apply_session_refinement(record, pass_request, provider,
                                               fps=SAMPLE_FPS)
    assert report.verdict == "pass"
    assert len(record.session.program_versions) == 2
    base_frames = list(render_sequence(base, SAMPLE_FPS).frames)
    orbit_frames = list(render_sequence(revised, SAMPLE_FPS).frames)
    assert frames_equal_outside_window(base_frames, orbit_frames, SAMPLE_FPS,
                                       pass_request.window) == []
    assert base_frames != orbit_frames

    # flash-twice pass (teaser): repeat bumps to 2 inside the window, every
    # frame outside [t1 - 1/fps, t2 + 1/fps] byte-identical
    flash_base = traffic_light_program(version=1)
    flash_revised = traffic_light_refined_program(version=2)
    flash_anchors = extract_keyframes(flash_base, fps=SAMPLE_FPS, render_frames=False)
    flash_request = RefinementRequest(
        session_id="accept", base_version=1,
        anchor=nearest_anchor(flash_anchors, 3.5), window=(1.5, 5.5),
        text="loop twice", strict=True)
    flash_report = validate_locality(flash_base, flash_revised, flash_request)
    assert flash_report.verdict == "pass"
    assert set(flash_report.diff.modified) == {"yellow-flash"}
    a = list(render_sequence(flash_base, SAMPLE_FPS).frames)
    b = list(render_sequence(flash_revised, SAMPLE_FPS).frames)
    assert len(a) == len(b) == 277
    assert frames_equal_outside_window(a, b, SAMPLE_FPS, flash_request.window) == []
    assert a != b
    passed("refinement locality (strict reject offenders exact; two stable passes)")


# --- criterion 5: end-to-end headless pipeline ---------------------------------------


def run_pipeline(workdir: str, fixtures_dir: str, answers: dict) -> dict[str, str]:
    """generate -> render -> refine -> render via the real CLI; returns
    sha256 of every output file."""
    os.makedirs(workdir, exist_ok=True)
    env = dict(os.environ, SDX_PROVIDER="fixture", SDX_FIXTURES_DIR=fixtures_dir)
    board_path = os.path.join(workdir, "board.sdproj")
    with open(board_path, "w", encoding="utf-8") as fh:
        fh.write(save_storyboard(traffic_light_storyboard()))
    answers_path = os.path.join(workdir, "answers.json")
    with open(answers_path, "w", encoding="utf-8") as fh:
        json.dump(answers, fh, sort_keys=True)

    def cli(*args):
        result = subprocess.run([sys.executable, "-m", "sdx.cli", *args],
                                capture_output=True, text=True, env=env, cwd=workdir)
        assert result.returncode == 0, f"{args}: {result.stdout}\n{result.stderr}"
        return result

    prog = os.path.join(workdir, "prog.ms.json")
    refined = os.path.join(workdir, "refined.ms.json")
    cli("generate", "--storyboard", board_path, "--answers", answers_path,
        "--out", prog)
    cli("render", prog, "--fps", "30", "--out", os.path.join(workdir, "frames-v1"))
    cli("refine", prog, "--at", "3.5", "--text", "loop twice", "--window", "2",
        "--strict", "--out", refined)
    cli("render", refined, "--fps", "30", "--out", os.path.join(workdir, "frames-v2"))

    hashes = {}
    for root, _, files in os.walk(workdir):
        for name in sorted(files):
            if name in ("board.sdproj", "answers.json"):
                continue
            path = os.path.join(root, name)
            rel = os.path.relpath(path, workdir)
            with open(path, "rb") as fh:
                hashes[rel] = hashlib.sha256(fh.read()).hexdigest()
    return hashes


def test_headless_pipeline_is_byte_reproducible(tmp_path):
    from sdx.cli import refinement_template

    fixtures = FixtureStore(tmp_path / "fixtures")
    info = install_traffic_light_generation(fixtures)
    install_traffic_light_refinement(fixtures, refinement_template())

    first = run_pipeline(str(tmp_path / "run1"), fixtures.root, info["answers"])
    second = run_pipeline(str(tmp_path / "run2"), fixtures.root, info["answers"])
    assert first == second, "pipeline outputs differ between runs"
    assert len(first) > 500  # two full frame sets plus programs and manifests

    # frame counts equal floor(D * fps) + 1 for both rendered versions
    for version_dir in ("run1/frames-v1", "run1/frames-v2"):
        with open(tmp_path / version_dir / "manifest.json", encoding="utf-8") as fh:
            manifest = json.load(fh)
        program_path = tmp_path / "run1" / ("prog.ms.json" if "v1" in version_dir
                                            else "refined.ms.json")
        program = parse(program_path.read_text())
        assert manifest["frameCount"] == frame_count_for(program.total_duration(), 30)
    passed("headless pipeline byte-reproducible (generate/render/refine/render x2)")


# --- criterion 6: session state machine ------------------------------------------------


def test_state_machine_safety_10000_sequences():
    storyboard = sketch_board()
    composite = composite_storyboard(storyboard)
    from sdx.gateway.types import ambiguity_from_jsonable

    report = [ambiguity_from_jsonable(raw, f"/{i}") for i, raw in enumerate(CANONICAL_ITEMS)]
    tiny = from_jsonable({"entities": [], "timeline": [], "version": 0})
    rng = random.Random(424242)
    from sdx.errors import InvalidTransition, UnknownCue

    for sequence in range(10_000):
        memory = DisambiguationMemory()
        session = GenerationSession(id=f"s{sequence}", storyboard_version="v")
        versions_seen = 0
        for _ in range(rng.randint(1, 10)):
            op = rng.choice(("begin", "surface", "resolve", "skip", "complete", "fail"))
            before = session.state
            before_versions = list(session.program_versions)
            try:
                if op == "begin":
                    session.begin_generation()
                elif op == "surface":
                    session.surface_cues(rng.sample(report, rng.randint(0, len(report))),
                                         storyboard, composite, memory)
                elif op == "resolve":
                    pending = list(session.pending.values())
                    if pending and rng.random() < 0.9:
                        cue = rng.choice(pending)
                        session.resolve(CueResolution(
                            cue_id=cue.id, answer=CANONICAL_ANSWERS[cue.source.id]),
                            memory)
                    else:
                        session.resolve(CueResolution(cue_id="missing",
                                                      answer={"confirmed": True}),
                                        memory)
                elif op == "skip":
                    pending = list(session.pending.values())
                    session.skip(rng.choice(pending).id if pending else "missing")
                elif op == "complete":
                    session.complete(tiny)
                elif op == "fail":
                    session.fail("induced")
            except (InvalidTransition, UnknownCue):
                assert session.state == before
                assert session.program_versions == before_versions
                continue
            if session.state != before:
                assert (before, session.state) in ALLOWED_TRANSITIONS, \
                    f"illegal edge {before} -> {session.state} via {op}"
            assert session.program_versions[:len(before_versions)] == before_versions, \
                "version history was rewritten"
            assert len(session.program_versions) >= versions_seen
            versions_seen = len(session.program_versions)
    passed("session state machine safety (10000 randomized sequences)")
