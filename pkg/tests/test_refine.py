from __future__ import annotations

import pytest

from corpus import (
    earth_orbit_base,
    earth_orbit_bad_revision,
    earth_orbit_revised,
    generation_request,
    earth_orbit_storyboard,
    line_stroke,
    orbit_overlay_strokes,
    reply_text,
)
from sdx.errors import EmptyRefinement, LocalityViolation
from sdx.gateway.fixtures import FixtureStore
from sdx.gateway.prompts import build_prompt
from sdx.gateway.providers import FixtureProvider
from sdx.motion.render import render_sequence
from sdx.refine import (
    KeyframeAnchor,
    RefinementRequest,
    build_refinement_context,
    compose_overlay,
    extract_keyframes,
    frames_equal_outside_window,
    nearest_anchor,
    refine_program,
    validate_locality,
    window_around,
)
from test_motion_engine import act, circle, program_with


def anchor_at(ts: float) -> KeyframeAnchor:
    return KeyframeAnchor(timestamp=ts, reasons=("action_start",), source_action_ids=())


def request_at(ts: float, window=None, strokes=(), text="go faster",
               strict=False) -> RefinementRequest:
    return RefinementRequest(
        session_id="s", base_version=1, anchor=anchor_at(ts),
        window=window or window_around(ts),
        overlay_strokes=tuple(strokes), text=text, strict=strict,
    )


# --- keyframe extraction ------------------------------------------------------


def test_keyframes_enumerate_action_boundaries():
    # starts {0, 1, 3} with durations {2, 1, 1} -> ends {2, 2, 4}; with the
    # program endpoints the anchor set is {0, 1, 2, 3, 4}
    p = program_with([
        act("a", to=[10.0, 0.0], start=0.0, duration=2.0),
        act("b", kind="scale", to=2.0, start=1.0, duration=1.0),
        act("c", kind="rotate", by=90.0, about="self", start=3.0, duration=1.0),
    ])
    anchors = extract_keyframes(p, fps=30, render_frames=False)
    assert [a.timestamp for a in anchors] == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert "program_start" in anchors[0].reasons
    assert "program_end" in anchors[-1].reasons
    assert set(anchors[2].source_action_ids) == {"a", "b"}


def test_empty_timeline_yields_single_anchor():
    anchors = extract_keyframes(program_with([]), render_frames=False)
    assert len(anchors) == 1
    assert anchors[0].timestamp == 0.0
    assert set(anchors[0].reasons) == {"program_start", "program_end"}


def test_anchors_closer_than_frame_interval_merge():
    # 0.010 < 1/30: the two starts merge, keeping the earliest timestamp
    p = program_with([
        act("a", to=[10.0, 0.0], start=1.0, duration=1.0),
        act("b", kind="scale", to=2.0, start=1.01, duration=1.0),
    ])
    anchors = extract_keyframes(p, fps=30, render_frames=False)
    times = [a.timestamp for a in anchors]
    assert 1.0 in times and 1.01 not in times
    merged = next(a for a in anchors if a.timestamp == 1.0)
    assert set(merged.source_action_ids) == {"a", "b"}


def test_anchor_cap_keeps_endpoints_and_show_stoppers():
    actions = [act(f"m{i}", to=[float(i), 0.0], start=0.4 * i + 0.2, duration=0.1)
               for i in range(18)]
    actions.append(act("pop-in", kind="appear", mode="pop", start=6.3, duration=0.1))
    p = program_with(actions)
    anchors = extract_keyframes(p, fps=30, render_frames=False)
    assert len(anchors) == 12
    assert anchors[0].timestamp == 0.0
    assert anchors[-1].timestamp == p.total_duration()
    assert any("pop-in" in a.source_action_ids for a in anchors)
    assert [a.timestamp for a in anchors] == sorted(a.timestamp for a in anchors)


def test_anchors_carry_rendered_frames():
    p = program_with([act(to=[10.0, 0.0], duration=1.0)])
    anchors = extract_keyframes(p, fps=30)
    assert all(a.frame_svg.startswith("<svg") for a in anchors)


def test_nearest_anchor_snaps():
    anchors = [anchor_at(0.0), anchor_at(2.0), anchor_at(5.0)]
    assert nearest_anchor(anchors, 1.9).timestamp == 2.0
    assert nearest_anchor(anchors, 3.4).timestamp == 2.0
    assert nearest_anchor(anchors, 3.6).timestamp == 5.0


# --- refinement context ----------------------------------------------------------


def test_context_with_overlay_only():
    base = earth_orbit_base()
    req = request_at(2.0, strokes=orbit_overlay_strokes(), text="")
    ctx = build_refinement_context(base, req)
    assert ctx.text == ""
    assert ctx.overlay_svg.count("<path") >= 2
    assert ctx.window == window_around(2.0)


def test_context_requires_overlay_or_text():
    with pytest.raises(EmptyRefinement):
        build_refinement_context(earth_orbit_base(), request_at(2.0, text=""))


def test_context_anchor_must_sit_inside_window():
    req = request_at(2.0, window=(3.0, 4.0))
    with pytest.raises(EmptyRefinement):
        build_refinement_context(earth_orbit_base(), req)


def test_context_lists_all_anchors_and_highlights_target():
    base = earth_orbit_base()  # boundaries: 0, 1, 2, 2.5, 5, 5.5
    req = request_at(2.5, text="hold longer")
    ctx = build_refinement_context(base, req)
    assert len(ctx.anchors) == 6
    assert ctx.anchors[ctx.target_index][0] == 2.5
    assert ctx.base_program_text.startswith('{"canvas"')


def test_compose_overlay_appends_paths():
    frame = "<svg><rect/></svg>"
    out = compose_overlay(frame, (line_stroke([(0, 0), (10, 10)], 0),))
    assert out.count("<path") == 1
    assert out.endswith("</svg>")


# --- locality ---------------------------------------------------------------------


def test_identity_revision_always_passes():
    base = earth_orbit_base()
    report = validate_locality(base, base, request_at(2.0, strict=True))
    assert report.verdict == "pass" and not report.offenders


def test_change_inside_window_passes():
    base = program_with([act("a", to=[10.0, 0.0], start=3.0, duration=2.0)])
    revised = program_with([act("a", to=[99.0, 0.0], start=3.0, duration=2.0)])
    report = validate_locality(base, revised, request_at(4.0, window=(2.0, 6.0), strict=True))
    assert report.verdict == "pass"


def test_out_of_window_modification_rejected_when_strict():
    base = program_with([
        act("inside", to=[10.0, 0.0], start=3.0, duration=1.0),
        act("outside", kind="scale", to=2.0, start=10.0, duration=2.0),
    ])
    revised = program_with([
        act("inside", to=[10.0, 0.0], start=3.0, duration=1.0),
        act("outside", kind="scale", to=3.0, start=10.0, duration=2.0),
    ])
    report = validate_locality(base, revised, request_at(4.0, window=(2.0, 6.0), strict=True))
    assert report.verdict == "reject"
    assert report.offenders == frozenset({"outside"})
    relaxed = validate_locality(base, revised, request_at(4.0, window=(2.0, 6.0), strict=False))
    assert relaxed.verdict == "warn"


def test_action_moved_out_of_window_is_an_offender():
    base = program_with([act("a", to=[10.0, 0.0], start=3.0, duration=1.0)])
    revised = program_with([act("a", to=[10.0, 0.0], start=10.0, duration=1.0)])
    report = validate_locality(base, revised, request_at(3.5, window=(2.0, 6.0), strict=True))
    assert report.offenders == frozenset({"a"})


def test_overlay_pointing_at_entity_exempts_its_actions():
    base = program_with([], entities=[circle("c", position=(100.0, 100.0))])
    revised = program_with(
        [act("late", entity="c", to=[400.0, 100.0], start=8.0, duration=1.0)],
        entities=[circle("c", position=(100.0, 100.0))],
    )
    over_entity = request_at(
        1.0, window=(0.0, 2.0),
        strokes=(line_stroke([(80.0, 80.0), (130.0, 130.0)], 0),), text="", strict=True)
    assert validate_locality(base, revised, over_entity).verdict == "pass"

    elsewhere = request_at(
        1.0, window=(0.0, 2.0),
        strokes=(line_stroke([(900.0, 900.0), (950.0, 950.0)], 0),), text="", strict=True)
    assert validate_locality(base, revised, elsewhere).offenders == frozenset({"late"})


def test_earth_orbit_revision_passes_and_is_stable_outside_window():
    base = earth_orbit_base(version=1)
    revised = earth_orbit_revised(version=2)
    req = request_at(2.0, window=(0.5, 3.5), strokes=orbit_overlay_strokes(),
                     text="", strict=True)
    report = validate_locality(base, revised, req)
    assert report.verdict == "pass"
    assert set(report.diff.added) == {"earth-orbit"}

    fps = 30
    base_frames = list(render_sequence(base, fps).frames)
    revised_frames = list(render_sequence(revised, fps).frames)
    assert len(base_frames) == len(revised_frames)
    assert frames_equal_outside_window(base_frames, revised_frames, fps, req.window) == []
    # sanity: the orbit does change frames inside the window
    assert base_frames != revised_frames


def test_bad_revision_offender_is_exactly_the_out_of_window_action():
    base = earth_orbit_base(version=1)
    revised = earth_orbit_bad_revision(version=2)
    req = request_at(2.0, window=(0.5, 3.5), text="the earth moves", strict=True)
    report = validate_locality(base, revised, req)
    assert report.verdict == "reject"
    assert report.offenders == frozenset({"sun-glow"})


# --- full refinement round-trip ------------------------------------------------------


def _install_refinement_fixture(store: FixtureStore, base, revised, req, template):
    ctx = build_refinement_context(base, req, fps=30)
    from dataclasses import replace

    bundle = build_prompt(replace(template, refinement=ctx))
    store.record_bundle(bundle, reply_text(revised))


def test_refine_program_roundtrip_pass(fixture_store):
    base = earth_orbit_base(version=1)
    template = generation_request(earth_orbit_storyboard())
    req = request_at(2.0, window=(0.5, 3.5), strokes=orbit_overlay_strokes(),
                     text="", strict=True)
    _install_refinement_fixture(fixture_store, base, earth_orbit_revised(2), req, template)
    revised, report = refine_program(base, req, template,
                                     FixtureProvider(fixture_store.root), fps=30)
    assert report.verdict == "pass"
    assert {a.id for a in revised.timeline} == {a.id for a in base.timeline} | {"earth-orbit"}


def test_refine_program_strict_reject_raises(fixture_store):
    base = earth_orbit_base(version=1)
    template = generation_request(earth_orbit_storyboard())
    req = request_at(2.0, window=(0.5, 3.5), text="the earth moves", strict=True)
    _install_refinement_fixture(fixture_store, base, earth_orbit_bad_revision(2), req, template)
    with pytest.raises(LocalityViolation) as err:
        refine_program(base, req, template, FixtureProvider(fixture_store.root), fps=30)
    assert err.value.report.offenders == frozenset({"sun-glow"})
