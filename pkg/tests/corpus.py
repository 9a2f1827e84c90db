"""Deterministic fixture corpus: storyboards, programs and canned replies.

Everything here is built through the package's own constructors so the
recorded prompt digests always match what the runtime produces.
"""

from __future__ import annotations

import json
from dataclasses import replace

from sdx.clarify import build_cue, render_resolution_text
from sdx.gateway.fixtures import FixtureStore
from sdx.gateway.prompts import build_prompt
from sdx.gateway.types import (
    GenerationRequest,
    ResolutionNote,
    ambiguity_from_jsonable,
)
from sdx.motion.grammar import GRAMMAR_DIGEST
from sdx.motion.model import MotionProgram
from sdx.motion.parser import from_jsonable, print_program
from sdx.storyboard import SketchFrame, Storyboard, Stroke, composite_storyboard

BLACK = (0.0, 0.0, 0.0, 1.0)


# --- stroke helpers -----------------------------------------------------------


def rect_stroke(x: float, y: float, w: float, h: float, seq: int,
                color=BLACK, width: float = 3.0) -> Stroke:
    pts = ((x, y), (x + w, y), (x + w, y + h), (x, y + h), (x, y))
    return Stroke(points=pts, color=color, width=width, seq=seq)


def ring_stroke(cx: float, cy: float, r: float, seq: int, n: int = 12,
                color=BLACK, width: float = 3.0) -> Stroke:
    import math

    pts = tuple(
        (cx + r * math.cos(2 * math.pi * k / n), cy + r * math.sin(2 * math.pi * k / n))
        for k in range(n + 1)
    )
    return Stroke(points=pts, color=color, width=width, seq=seq)


def line_stroke(points, seq: int, color=BLACK, width: float = 3.0) -> Stroke:
    return Stroke(points=tuple(points), color=color, width=width, seq=seq)


# --- raw reply builder --------------------------------------------------------


def reply_text(program: MotionProgram, ambiguities: list | None = None) -> str:
    amb = json.dumps(ambiguities or [], indent=2)
    return (
        "Interpreting the storyboard.\n\n"
        f"```json\n{print_program(program)}\n```\n\n"
        f"```json\n{amb}\n```\n"
    )


# --- traffic-light scenario (teaser) ------------------------------------------


def traffic_light_storyboard() -> Storyboard:
    frames = (
        SketchFrame(index=0, script="red light, the car waits", strokes=(
            rect_stroke(740, 140, 120, 320, 0),
            ring_stroke(800, 200, 40, 1),
            rect_stroke(120, 660, 160, 80, 2),
            line_stroke([(0, 760), (1600, 760)], 3),
        )),
        SketchFrame(index=1, script="yellow light flashes", strokes=(
            rect_stroke(740, 140, 120, 320, 0),
            ring_stroke(800, 300, 40, 1),
            line_stroke([(880, 260), (940, 230)], 2),
            line_stroke([(880, 320), (940, 350)], 3),
            rect_stroke(120, 660, 160, 80, 4),
        )),
        SketchFrame(index=2, script="green light, the car goes", strokes=(
            rect_stroke(740, 140, 120, 320, 0),
            ring_stroke(800, 400, 40, 1),
            line_stroke([(320, 700), (720, 700)], 2),
            line_stroke([(660, 670), (720, 700), (660, 730)], 3),
            rect_stroke(120, 660, 160, 80, 4),
        )),
        SketchFrame(index=3, script="the car has crossed", strokes=(
            rect_stroke(1240, 660, 160, 80, 0),
            line_stroke([(0, 760), (1600, 760)], 1),
        )),
    )
    return Storyboard(id="traffic-light", frames=frames)


def _traffic_light_jsonable(car_duration: float, flash_repeat: int, version: int) -> dict:
    return {
        "canvas": {"width": 1600.0, "height": 900.0, "background": [1, 1, 1, 1]},
        "entities": [
            {"id": "housing", "kind": "rect",
             "geometry": {"width": 120.0, "height": 320.0},
             "style": {"fill": [0.2, 0.2, 0.2, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [800.0, 300.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}},
            {"id": "red", "kind": "circle", "geometry": {"radius": 40.0},
             "style": {"fill": [0.9, 0.1, 0.1, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [800.0, 200.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}},
            {"id": "yellow", "kind": "circle", "geometry": {"radius": 40.0},
             "style": {"fill": [1.0, 0.85, 0.1, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [800.0, 300.0], "rotation": 0.0,
                         "scale": 1.0, "visible": False}},
            {"id": "green", "kind": "circle", "geometry": {"radius": 40.0},
             "style": {"fill": [0.1, 0.8, 0.2, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [800.0, 400.0], "rotation": 0.0,
                         "scale": 1.0, "visible": False}},
            {"id": "car", "kind": "rect",
             "geometry": {"width": 160.0, "height": 70.0},
             "style": {"fill": [0.15, 0.35, 0.8, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [200.0, 700.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}},
            {"id": "road", "kind": "path",
             "geometry": {"points": [[-800.0, 0.0], [800.0, 0.0]]},
             "style": {"fill": [0, 0, 0, 0], "stroke": [0.1, 0.1, 0.1, 1.0],
                       "strokeWidth": 6.0, "opacity": 1.0},
             "initial": {"position": [800.0, 760.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}},
        ],
        "timeline": [
            {"id": "red-off", "entityId": "red", "kind": "disappear", "mode": "fade",
             "start": 2.5, "duration": 0.4, "easing": "linear", "repeat": 1},
            {"id": "yellow-flash", "entityId": "yellow", "kind": "appear", "mode": "fade",
             "start": 3.0, "duration": 0.5, "easing": "linear", "repeat": flash_repeat},
            {"id": "yellow-off", "entityId": "yellow", "kind": "disappear", "mode": "fade",
             "start": 4.5, "duration": 0.3, "easing": "linear", "repeat": 1},
            {"id": "green-on", "entityId": "green", "kind": "appear", "mode": "fade",
             "start": 5.0, "duration": 0.4, "easing": "easeOut", "repeat": 1},
            {"id": "car-move", "entityId": "car", "kind": "translate",
             "to": [1400.0, 700.0], "start": 5.2, "duration": car_duration,
             "easing": "easeInOut", "repeat": 1},
        ],
        "version": version,
    }


def traffic_light_guess_program() -> MotionProgram:
    """The model's pre-clarification primary guess (car crossing 2 s)."""
    return from_jsonable(_traffic_light_jsonable(2.0, 1, 0))


def traffic_light_program(version: int = 1) -> MotionProgram:
    """Post-clarification program: car crossing takes the answered 4 s."""
    return from_jsonable(_traffic_light_jsonable(4.0, 1, version))


def traffic_light_refined_program(version: int = 2) -> MotionProgram:
    """The flash action replays twice (the teaser's second refinement)."""
    return from_jsonable(_traffic_light_jsonable(4.0, 2, version))


def traffic_light_ambiguities() -> list[dict]:
    return [
        {
            "id": "amb-car-timing",
            "kind": "missing_parameter",
            "question": "How long should the car take to cross the scene?",
            "frameIndex": 2,
            "region": [60.0, 330.0, 400.0, 400.0],
            "parameter": {"name": "car crossing duration", "unit": "s",
                          "min": 1.0, "max": 10.0, "default": 2.0},
        },
        {
            "id": "amb-car-asset",
            "kind": "abstract_symbol",
            "question": "The box on the road looks like a vehicle; should a car icon be used?",
            "frameIndex": 0,
            "region": [60.0, 330.0, 145.0, 375.0],
            "assetHint": "a simple side-view car icon (SVG)",
        },
    ]


TRAFFIC_LIGHT_ANSWERS = {
    "amb-car-timing": {"value": 4, "unit": "s"},
    "amb-car-asset": {"text": "keep the plain rounded rectangle as the car"},
}


def expected_notes(storyboard: Storyboard, ambiguities: list[dict],
                   answers_by_id: dict[str, dict]) -> tuple[ResolutionNote, ...]:
    """The resolution notes a session accumulates when it resolves the
    given ambiguities in report order."""
    composite = composite_storyboard(storyboard)
    notes = []
    for i, raw in enumerate(ambiguities):
        item = ambiguity_from_jsonable(raw, f"/ambiguities/{i}")
        cue = build_cue(item, storyboard, composite)
        answer = answers_by_id[item.id]
        notes.append(ResolutionNote(cue_id=cue.id, text=render_resolution_text(cue, answer)))
    return tuple(notes)


def memory_key_answers(storyboard: Storyboard, ambiguities: list[dict],
                       answers_by_id: dict[str, dict]) -> dict[str, dict]:
    """Answers keyed by cue memoryKey (the CLI answers-file format)."""
    composite = composite_storyboard(storyboard)
    out = {}
    for i, raw in enumerate(ambiguities):
        item = ambiguity_from_jsonable(raw, f"/ambiguities/{i}")
        cue = build_cue(item, storyboard, composite)
        out[cue.memory_key] = answers_by_id[item.id]
    return out


def generation_request(storyboard: Storyboard,
                       notes: tuple[ResolutionNote, ...] = ()) -> GenerationRequest:
    return GenerationRequest(
        composite=composite_storyboard(storyboard),
        scripts=tuple(f.script for f in storyboard.frames),
        grammar_digest=GRAMMAR_DIGEST,
        resolutions=notes,
    )


def install_traffic_light_generation(store: FixtureStore) -> dict:
    """Record the two-step generation exchange for the traffic-light board."""
    storyboard = traffic_light_storyboard()
    ambiguities = traffic_light_ambiguities()

    bundle0 = build_prompt(generation_request(storyboard))
    store.record_bundle(bundle0, reply_text(traffic_light_guess_program(), ambiguities))

    notes = expected_notes(storyboard, ambiguities, TRAFFIC_LIGHT_ANSWERS)
    bundle1 = build_prompt(generation_request(storyboard, notes))
    store.record_bundle(bundle1, reply_text(traffic_light_program(version=1)))

    return {
        "storyboard": storyboard,
        "ambiguities": ambiguities,
        "notes": notes,
        "answers": memory_key_answers(storyboard, ambiguities, TRAFFIC_LIGHT_ANSWERS),
    }


def install_traffic_light_refinement(store: FixtureStore, template: GenerationRequest,
                                     fps: int = 30) -> dict:
    """Record the 'loop twice' refinement exchange against version 1."""
    from sdx.refine import (
        RefinementRequest,
        build_refinement_context,
        extract_keyframes,
        nearest_anchor,
    )

    base = traffic_light_program(version=1)
    anchors = extract_keyframes(base, fps=fps, render_frames=False)
    anchor = nearest_anchor(anchors, 3.5)
    request = RefinementRequest(
        session_id="cli", base_version=1, anchor=anchor,
        window=(max(0.0, anchor.timestamp - 2.0), anchor.timestamp + 2.0),
        text="loop twice", strict=True,
    )
    context = build_refinement_context(base, request, fps=fps)
    bundle = build_prompt(replace(template, refinement=context))
    store.record_bundle(bundle, reply_text(traffic_light_refined_program(version=2)))
    return {"base": base, "request": request, "window": request.window}


# --- earth-orbit scenario (refinement workflow) --------------------------------


def earth_orbit_storyboard() -> Storyboard:
    frames = (
        SketchFrame(index=0, script="the sun appears in the middle", strokes=(
            ring_stroke(800, 450, 80, 0),
            line_stroke([(760, 410), (840, 490)], 1),
        )),
        SketchFrame(index=1, script="a small planet sits on the orbit ring", strokes=(
            ring_stroke(800, 450, 80, 0),
            ring_stroke(800, 450, 200, 1, n=24),
            ring_stroke(1000, 450, 30, 2),
        )),
    )
    return Storyboard(id="earth-orbit", frames=frames)


def _orbit_path(cx: float, cy: float, r: float, n: int = 24) -> list[list[float]]:
    import math

    from sdx.geometry import q6

    pts = [[q6(cx + r * math.cos(2 * math.pi * k / n)),
            q6(cy + r * math.sin(2 * math.pi * k / n))] for k in range(n)]
    pts.append(list(pts[0]))
    return pts


def _earth_orbit_jsonable(with_orbit: bool, glow_color: list, version: int) -> dict:
    timeline = [
        {"id": "sun-in", "entityId": "sun", "kind": "appear", "mode": "fade",
         "start": 0.0, "duration": 1.0, "easing": "easeOut", "repeat": 1},
        {"id": "sun-pulse", "entityId": "sun", "kind": "scale", "to": 1.1,
         "start": 2.0, "duration": 0.5, "easing": "easeInOut", "repeat": 1},
        {"id": "sun-glow", "entityId": "sun", "kind": "recolor", "to": glow_color,
         "start": 5.0, "duration": 0.5, "easing": "linear", "repeat": 1},
    ]
    if with_orbit:
        timeline.insert(2, {
            "id": "earth-orbit", "entityId": "earth", "kind": "translate",
            "alongPath": _orbit_path(800.0, 450.0, 200.0),
            "start": 2.0, "duration": 1.5, "easing": "linear", "repeat": 1,
        })
    return {
        "canvas": {"width": 1600.0, "height": 900.0, "background": [1, 1, 1, 1]},
        "entities": [
            {"id": "sun", "kind": "circle", "geometry": {"radius": 80.0},
             "style": {"fill": [1.0, 0.8, 0.1, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [800.0, 450.0], "rotation": 0.0,
                         "scale": 1.0, "visible": False}},
            {"id": "ring", "kind": "circle", "geometry": {"radius": 200.0},
             "style": {"fill": [0, 0, 0, 0], "stroke": [0.6, 0.6, 0.6, 1.0],
                       "strokeWidth": 2.0, "opacity": 1.0},
             "initial": {"position": [800.0, 450.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}},
            {"id": "earth", "kind": "circle", "geometry": {"radius": 30.0},
             "style": {"fill": [0.2, 0.4, 0.9, 1.0], "stroke": [0, 0, 0, 0],
                       "strokeWidth": 0.0, "opacity": 1.0},
             "initial": {"position": [1000.0, 450.0], "rotation": 0.0,
                         "scale": 1.0, "visible": True}},
        ],
        "timeline": timeline,
        "version": version,
    }


GLOW_BASE = [1.0, 0.8, 0.1, 1.0]
GLOW_CHANGED = [1.0, 0.4, 0.0, 1.0]


def earth_orbit_base(version: int = 1) -> MotionProgram:
    return from_jsonable(_earth_orbit_jsonable(False, [1.0, 0.6, 0.05, 1.0], version))


def earth_orbit_revised(version: int = 2) -> MotionProgram:
    """Base plus a closed orbit loop on the earth inside [2.0, 3.5]."""
    return from_jsonable(_earth_orbit_jsonable(True, [1.0, 0.6, 0.05, 1.0], version))


def earth_orbit_bad_revision(version: int = 2) -> MotionProgram:
    """Also recolors the sun at 5 s, far outside the window: must reject."""
    return from_jsonable(_earth_orbit_jsonable(True, GLOW_CHANGED, version))


def orbit_overlay_strokes() -> tuple[Stroke, ...]:
    return (
        line_stroke([(1000.0, 380.0), (1010.0, 420.0), (1050.0, 440.0)], 0,
                    color=(0.9, 0.1, 0.1, 1.0), width=4.0),
        line_stroke([(1035.0, 425.0), (1050.0, 440.0), (1030.0, 450.0)], 1,
                    color=(0.9, 0.1, 0.1, 1.0), width=4.0),
    )
