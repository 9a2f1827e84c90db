"""The files under schema/ must describe what the code actually emits."""

from __future__ import annotations

import json
import os

import pytest
from jsonschema import Draft202012Validator
from referencing import Registry, Resource

from corpus import (
    earth_orbit_bad_revision,
    earth_orbit_base,
    traffic_light_program,
    traffic_light_storyboard,
)
from sdx.clarify import cue_jsonable
from sdx.motion.parser import to_jsonable
from sdx.motion.render import render_sequence
from sdx.refine import validate_locality
from sdx.storyboard import storyboard_to_jsonable
from test_clarify import cues
from test_refine import request_at

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), "..", "schema")


def load_schemas() -> dict[str, dict]:
    out = {}
    for name in os.listdir(SCHEMA_DIR):
        if name.endswith(".schema.json"):
            with open(os.path.join(SCHEMA_DIR, name), encoding="utf-8") as fh:
                schema = json.load(fh)
            out[schema["$id"]] = schema
    return out


SCHEMAS = load_schemas()

REGISTRY = Registry().with_resources(
    (schema_id, Resource.from_contents(schema)) for schema_id, schema in SCHEMAS.items()
)


def validator(schema_id: str) -> Draft202012Validator:
    return Draft202012Validator(SCHEMAS[schema_id], registry=REGISTRY)


def test_all_schema_files_are_valid_schemas():
    assert len(SCHEMAS) >= 7
    for schema in SCHEMAS.values():
        Draft202012Validator.check_schema(schema)


def test_motion_program_payload_validates():
    validator("https://schemas.sdx.dev/motion-program.v1.json").validate(to_jsonable(traffic_light_program()))
    validator("https://schemas.sdx.dev/motion-program.v1.json").validate(to_jsonable(earth_orbit_base()))


def test_sdproj_payload_validates():
    validator("https://schemas.sdx.dev/sdproj.v1.json").validate(storyboard_to_jsonable(traffic_light_storyboard()))


def test_cue_payloads_validate():
    v = validator("https://schemas.sdx.dev/cue.v1.json")
    for cue in cues():
        v.validate(cue_jsonable(cue))


def test_cue_resolution_payloads_validate():
    v = validator("https://schemas.sdx.dev/cue-resolution.v1.json")
    for answer in ({"confirmed": True}, {"chosenOptionIndex": 1},
                   {"value": 2, "unit": "s"}, {"text": "a note"}, {"assetRef": "car"}):
        v.validate({"cueId": "c1", "answer": answer})
    with pytest.raises(Exception):
        v.validate({"cueId": "c1", "answer": {"confirmed": "yes"}})


def test_locality_report_payload_validates():
    report = validate_locality(earth_orbit_base(1), earth_orbit_bad_revision(2),
                               request_at(2.0, window=(0.5, 3.5), strict=True))
    validator("https://schemas.sdx.dev/locality-report.v1.json").validate(report.jsonable())


def test_render_manifest_payload_validates():
    manifest = render_sequence(traffic_light_program(), 10).manifest()
    validator("https://schemas.sdx.dev/render-manifest.v1.json").validate(manifest)


def test_refinement_request_payload_validates():
    v = validator("https://schemas.sdx.dev/refinement-request.v1.json")
    v.validate({
        "anchor": {"timestamp": 2.0},
        "window": [0.5, 3.5],
        "strict": True,
        "overlayStrokes": [{"points": [[0, 0], [10, 10]], "seq": 0,
                            "color": [1, 0, 0, 1], "width": 4.0}],
    })
    with pytest.raises(Exception):
        v.validate({"anchor": {"timestamp": 2.0}})  # neither strokes nor text
