"""Canonical text form of motion programs (`.ms.json`).

parse(print_program(p)) == p for every valid program: all floats are
quantized to 6 decimals on the way in, and the printer writes sorted keys
with fixed 6-decimal floats, so the text form is byte-stable.
"""

from __future__ import annotations

import json
from typing import Any

from ..errors import ProgramSyntaxError, ValidationError
from ..geometry import q6
from ..jsoncanon import dumps_canonical
from .model import (
    Action,
    Canvas,
    Entity,
    Initial,
    MotionProgram,
    Style,
    validate_program,
)

_GEOMETRY_FLOAT_KEYS = ("radius", "width", "height", "fontSize")


def parse(text: str) -> MotionProgram:
    """Parse and validate program text. Raises ProgramSyntaxError on bad
    JSON and ValidationError (with a JSON-pointer location) on bad shape."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProgramSyntaxError(f"malformed JSON: {exc}")
    return from_jsonable(raw)


def from_jsonable(raw: Any) -> MotionProgram:
    if not isinstance(raw, dict):
        raise ValidationError("program must be an object", "")
    canvas = _canvas_from(raw.get("canvas", {}))
    entities = tuple(_entity_from(e, f"/entities/{i}")
                     for i, e in enumerate(_expect_list(raw, "entities")))
    timeline = tuple(_action_from(a, f"/timeline/{i}")
                     for i, a in enumerate(_expect_list(raw, "timeline")))
    version = raw.get("version", 0)
    if not isinstance(version, int):
        raise ValidationError("version must be an integer", "/version")
    program = MotionProgram(canvas=canvas, entities=entities, timeline=timeline, version=version)
    validate_program(program)
    return program


def _expect_list(raw: dict, key: str) -> list:
    value = raw.get(key, [])
    if not isinstance(value, list):
        raise ValidationError(f"{key} must be an array", f"/{key}")
    return value


def _num(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError("expected a number", where)
    return q6(value)


def _color_from(value: Any, where: str) -> tuple[float, float, float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 4:
        raise ValidationError("color must be [r,g,b,a]", where)
    return tuple(_num(c, f"{where}/{i}") for i, c in enumerate(value))  # type: ignore


def _point_from(value: Any, where: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError("point must be [x,y]", where)
    return (_num(value[0], f"{where}/0"), _num(value[1], f"{where}/1"))


def _canvas_from(raw: Any) -> Canvas:
    if not isinstance(raw, dict):
        raise ValidationError("canvas must be an object", "/canvas")
    return Canvas(
        width=_num(raw.get("width", 1600.0), "/canvas/width"),
        height=_num(raw.get("height", 900.0), "/canvas/height"),
        background=_color_from(raw.get("background", [1, 1, 1, 1]), "/canvas/background"),
    )


def _geometry_from(raw: Any, where: str) -> dict[str, Any]:
    if not isinstance(raw, dict):
        raise ValidationError("geometry must be an object", where)
    geometry: dict[str, Any] = {}
    for key, value in raw.items():
        if key in _GEOMETRY_FLOAT_KEYS:
            geometry[key] = _num(value, f"{where}/{key}")
        elif key == "points":
            if not isinstance(value, (list, tuple)):
                raise ValidationError("points must be an array", f"{where}/points")
            geometry[key] = [list(_point_from(p, f"{where}/points/{i}"))
                             for i, p in enumerate(value)]
        else:
            geometry[key] = value
    return geometry


def _entity_from(raw: Any, where: str) -> Entity:
    if not isinstance(raw, dict):
        raise ValidationError("entity must be an object", where)
    style_raw = raw.get("style", {})
    if not isinstance(style_raw, dict):
        raise ValidationError("style must be an object", where + "/style")
    initial_raw = raw.get("initial", {})
    if not isinstance(initial_raw, dict):
        raise ValidationError("initial must be an object", where + "/initial")
    style = Style(
        fill=_color_from(style_raw.get("fill", [0, 0, 0, 1]), where + "/style/fill"),
        stroke=_color_from(style_raw.get("stroke", [0, 0, 0, 0]), where + "/style/stroke"),
        stroke_width=_num(style_raw.get("strokeWidth", 0.0), where + "/style/strokeWidth"),
        opacity=_num(style_raw.get("opacity", 1.0), where + "/style/opacity"),
    )
    visible = initial_raw.get("visible", True)
    if not isinstance(visible, bool):
        raise ValidationError("visible must be a boolean", where + "/initial/visible")
    initial = Initial(
        position=_point_from(initial_raw.get("position", [0, 0]), where + "/initial/position"),
        rotation=_num(initial_raw.get("rotation", 0.0), where + "/initial/rotation"),
        scale=_num(initial_raw.get("scale", 1.0), where + "/initial/scale"),
        visible=visible,
    )
    return Entity(
        id=str(raw.get("id", "")),
        kind=str(raw.get("kind", "")),
        geometry=_geometry_from(raw.get("geometry", {}), where + "/geometry"),
        style=style,
        initial=initial,
    )


def _action_from(raw: Any, where: str) -> Action:
    if not isinstance(raw, dict):
        raise ValidationError("action must be an object", where)
    kind = str(raw.get("kind", ""))
    params: dict[str, Any] = {}
    if kind in ("appear", "disappear"):
        params["mode"] = raw.get("mode", "fade")
    elif kind == "translate":
        if "to" in raw:
            params["to"] = list(_point_from(raw["to"], where + "/to"))
        if "alongPath" in raw:
            path = raw["alongPath"]
            if not isinstance(path, (list, tuple)):
                raise ValidationError("alongPath must be an array", where + "/alongPath")
            params["alongPath"] = [list(_point_from(p, f"{where}/alongPath/{i}"))
                                   for i, p in enumerate(path)]
    elif kind == "rotate":
        params["by"] = _num(raw.get("by", 0.0), where + "/by")
        about = raw.get("about", "self")
        params["about"] = about if about == "self" else list(_point_from(about, where + "/about"))
    elif kind == "scale":
        params["to"] = _num(raw.get("to", 1.0), where + "/to")
    elif kind == "recolor":
        params["to"] = list(_color_from(raw.get("to", [0, 0, 0, 1]), where + "/to"))
    elif kind == "morph":
        target = raw.get("toGeometry")
        if not isinstance(target, dict):
            raise ValidationError("morph needs toGeometry", where + "/toGeometry")
        merged = dict(target)
        merged_kind = merged.pop("kind", None)
        geometry = _geometry_from(merged, where + "/toGeometry")
        geometry["kind"] = merged_kind
        params["toGeometry"] = geometry

    repeat = raw.get("repeat", 1)
    if isinstance(repeat, bool) or not isinstance(repeat, int):
        raise ValidationError("repeat must be an integer", where + "/repeat")
    start = raw.get("start", 0.0)
    duration = raw.get("duration", 0.0)
    if isinstance(start, (int, float)) and not isinstance(start, bool):
        start = q6(start)
    else:
        raise ValidationError("start must be a number", where + "/start")
    if isinstance(duration, (int, float)) and not isinstance(duration, bool):
        duration = q6(duration)
    else:
        raise ValidationError("duration must be a number", where + "/duration")
    return Action(
        id=str(raw.get("id", "")),
        entity_id=str(raw.get("entityId", "")),
        kind=kind,
        start=start,
        duration=duration,
        easing=str(raw.get("easing", "linear")),
        repeat=repeat,
        params=params,
    )


# --- printing ---------------------------------------------------------------


def to_jsonable(program: MotionProgram) -> dict[str, Any]:
    return {
        "canvas": {
            "width": float(program.canvas.width),
            "height": float(program.canvas.height),
            "background": [float(c) for c in program.canvas.background],
        },
        "entities": [_entity_jsonable(e) for e in program.entities],
        "timeline": [_action_jsonable(a) for a in program.timeline],
        "version": program.version,
    }


def _entity_jsonable(entity: Entity) -> dict[str, Any]:
    geometry: dict[str, Any] = {}
    for key, value in entity.geometry.items():
        if key in _GEOMETRY_FLOAT_KEYS:
            geometry[key] = float(value)
        elif key == "points":
            geometry[key] = [[float(x), float(y)] for x, y in value]
        else:
            geometry[key] = value
    return {
        "id": entity.id,
        "kind": entity.kind,
        "geometry": geometry,
        "style": {
            "fill": [float(c) for c in entity.style.fill],
            "stroke": [float(c) for c in entity.style.stroke],
            "strokeWidth": float(entity.style.stroke_width),
            "opacity": float(entity.style.opacity),
        },
        "initial": {
            "position": [float(entity.initial.position[0]), float(entity.initial.position[1])],
            "rotation": float(entity.initial.rotation),
            "scale": float(entity.initial.scale),
            "visible": entity.initial.visible,
        },
    }


def _action_jsonable(action: Action) -> dict[str, Any]:
    raw: dict[str, Any] = {
        "id": action.id,
        "entityId": action.entity_id,
        "kind": action.kind,
        "start": float(action.start),
        "duration": float(action.duration),
        "easing": action.easing,
        "repeat": action.repeat,
    }
    p = action.params
    if action.kind in ("appear", "disappear"):
        raw["mode"] = p.get("mode", "fade")
    elif action.kind == "translate":
        if "to" in p:
            raw["to"] = [float(p["to"][0]), float(p["to"][1])]
        else:
            raw["alongPath"] = [[float(x), float(y)] for x, y in p["alongPath"]]
    elif action.kind == "rotate":
        raw["by"] = float(p["by"])
        about = p.get("about", "self")
        raw["about"] = about if about == "self" else [float(about[0]), float(about[1])]
    elif action.kind == "scale":
        raw["to"] = float(p["to"])
    elif action.kind == "recolor":
        raw["to"] = [float(c) for c in p["to"]]
    elif action.kind == "morph":
        target = dict(p["toGeometry"])
        kind = target.pop("kind")
        jsonable: dict[str, Any] = {"kind": kind}
        for key, value in target.items():
            if key in _GEOMETRY_FLOAT_KEYS:
                jsonable[key] = float(value)
            elif key == "points":
                jsonable[key] = [[float(x), float(y)] for x, y in value]
            else:
                jsonable[key] = value
        raw["toGeometry"] = jsonable
    return raw


def print_program(program: MotionProgram) -> str:
    """Canonical text form: sorted keys, 6-decimal floats, one line."""
    return dumps_canonical(to_jsonable(program))


def load_program_file(path) -> MotionProgram:
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def save_program_file(program: MotionProgram, path) -> None:
    validate_program(program)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(print_program(program))
