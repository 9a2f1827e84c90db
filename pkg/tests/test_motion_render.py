from __future__ import annotations

import json
import os
import random
import xml.etree.ElementTree as ET

import pytest

from oracle import random_program_jsonable
from sdx.errors import FpsOutOfRange
from sdx.motion.diffing import diff, diff_jsonable
from sdx.motion.parser import from_jsonable
from sdx.motion.render import frame_count_for, render_sequence, write_frameset
from test_motion_engine import act, circle, program_with


# --- frame counts ------------------------------------------------------------


def test_empty_timeline_renders_one_frame():
    frameset = render_sequence(program_with([]), 30)
    assert frameset.frame_count == 1


def test_two_seconds_at_30fps_is_61_frames():
    p = program_with([act(to=[10.0, 0.0], duration=2.0)])
    assert render_sequence(p, 30).frame_count == 61


def test_frame_count_floor_behavior():
    assert frame_count_for(0.0, 30) == 1
    assert frame_count_for(2.0, 30) == 61
    assert frame_count_for(0.7, 30) == 22  # 0.7*30 = 21 exactly
    assert frame_count_for(9.2, 30) == 277
    assert frame_count_for(1.999999, 30) == 60  # floor(59.99997) = 59


def test_fps_bounds():
    p = program_with([])
    for bad in (0, 121, -1, 2.5, True):
        with pytest.raises(FpsOutOfRange):
            render_sequence(p, bad)


# --- determinism ----------------------------------------------------------------


def test_rendering_is_byte_deterministic():
    rng = random.Random(9)
    p = from_jsonable(random_program_jsonable(rng))
    a = render_sequence(p, 24)
    b = render_sequence(p, 24)
    assert a.frames == b.frames


def test_parallel_rendering_matches_serial():
    rng = random.Random(10)
    p = from_jsonable(random_program_jsonable(rng))
    serial = render_sequence(p, 12, workers=1)
    parallel = render_sequence(p, 12, workers=4)
    assert serial.frames == parallel.frames


# --- frame content ----------------------------------------------------------------


def test_frames_are_wellformed_svg_with_background():
    p = program_with([act(to=[100.0, 100.0], duration=1.0)])
    frameset = render_sequence(p, 10)
    for frame in frameset.frames:
        root = ET.fromstring(frame)
        assert root.tag.endswith("svg")
    assert 'fill="rgb(255,255,255)"' in frameset.frames[0]


def test_invisible_entity_not_rendered():
    p = program_with(
        [act(kind="appear", mode="none", start=1.0, duration=0.0)],
        entities=[circle("c", visible=False)],
    )
    frameset = render_sequence(p, 2)
    assert 'id="c"' not in frameset.frames[0]
    assert 'id="c"' in frameset.frames[-1]


def test_asset_placeholder_without_resolver():
    p = from_jsonable({
        "canvas": {"width": 100.0, "height": 100.0, "background": [1, 1, 1, 1]},
        "entities": [{
            "id": "icon", "kind": "asset", "geometry": {"assetId": "car"},
            "style": {"fill": [0, 0, 0, 1], "stroke": [0, 0, 0, 0],
                      "strokeWidth": 0.0, "opacity": 1.0},
            "initial": {"position": [50.0, 50.0], "rotation": 0.0, "scale": 1.0,
                        "visible": True}}],
        "timeline": [],
        "version": 0,
    })
    frames = render_sequence(p, 1).frames
    assert '<g data-asset="car"/>' in frames[0]
    resolved = render_sequence(p, 1, assets={"car": "<svg><rect/></svg>"}.get).frames
    assert "<rect/>" in resolved[0]


def test_write_frameset_writes_manifest_and_files(tmp_path):
    p = program_with([act(to=[10.0, 0.0], duration=0.5)])
    frameset = render_sequence(p, 10)
    manifest = write_frameset(frameset, tmp_path / "frames")
    assert manifest["frameCount"] == 6
    assert manifest["files"][0] == "frame_00000.svg"
    with open(tmp_path / "frames" / "manifest.json", encoding="utf-8") as fh:
        on_disk = json.load(fh)
    assert on_disk == manifest
    assert sorted(os.listdir(tmp_path / "frames")) == sorted(
        manifest["files"] + ["manifest.json"])


# --- diff ----------------------------------------------------------------------


def test_diff_of_identical_programs_is_empty():
    p = program_with([act(to=[10.0, 0.0])])
    assert diff(p, p).is_empty()


def test_diff_flags_single_field_change_as_modified():
    a = program_with([act("a1", to=[10.0, 0.0], duration=1.0)])
    b = program_with([act("a1", to=[10.0, 0.0], duration=2.0)])
    d = diff(a, b)
    assert set(d.modified) == {"a1"}
    assert not d.added and not d.removed
    assert d.modified["a1"].before.duration == 1.0
    assert d.modified["a1"].after.duration == 2.0


def test_diff_new_entity_and_action_counted_once_each():
    a = program_with([act("a1", to=[10.0, 0.0])])
    b = program_with(
        [act("a1", to=[10.0, 0.0]), act("a2", entity="d", kind="scale", to=2.0)],
        entities=[circle("c"), circle("d")],
    )
    d = diff(a, b)
    assert set(d.added) == {"a2"}
    assert d.entities_added == frozenset({"d"})
    assert not d.modified and not d.removed and not d.entities_removed


def test_diff_removed_action():
    a = program_with([act("a1", to=[10.0, 0.0]), act("a2", kind="scale", to=2.0)])
    b = program_with([act("a1", to=[10.0, 0.0])])
    d = diff(a, b)
    assert set(d.removed) == {"a2"}


def test_diff_jsonable_shape():
    a = program_with([act("a1", to=[10.0, 0.0])])
    b = program_with([act("a1", to=[20.0, 0.0])])
    raw = diff_jsonable(diff(a, b))
    assert set(raw) == {"added", "removed", "modified", "entityChanges"}
    assert raw["modified"]["a1"]["before"]["to"] == [10.0, 0.0]
    assert raw["modified"]["a1"]["after"]["to"] == [20.0, 0.0]
