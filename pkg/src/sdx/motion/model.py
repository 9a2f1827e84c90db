"""Data model of the motion program DSL.

A program is a canvas, a set of vector entities, and a timeline of eased
actions with absolute start times. Values are immutable once built; all
mutation-looking helpers return new objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Optional

from ..errors import ValidationError
from ..geometry import Point, is_finite

ENTITY_KINDS = ("circle", "rect", "polygon", "path", "text", "asset")
ACTION_KINDS = ("appear", "disappear", "translate", "rotate", "scale", "recolor", "morph")
EASINGS = ("linear", "easeIn", "easeOut", "easeInOut")
APPEAR_MODES = ("fade", "pop", "none")
DISAPPEAR_MODES = ("fade", "none")
MORPHABLE_KINDS = ("circle", "rect", "polygon", "path")

RGBA = tuple[float, float, float, float]


@dataclass(frozen=True)
class Canvas:
    width: float = 1600.0
    height: float = 900.0
    background: RGBA = (1.0, 1.0, 1.0, 1.0)


@dataclass(frozen=True)
class Style:
    fill: RGBA = (0.0, 0.0, 0.0, 1.0)
    stroke: RGBA = (0.0, 0.0, 0.0, 0.0)
    stroke_width: float = 0.0
    opacity: float = 1.0


@dataclass(frozen=True)
class Initial:
    position: Point = (0.0, 0.0)
    rotation: float = 0.0
    scale: float = 1.0
    visible: bool = True


@dataclass(frozen=True)
class Entity:
    id: str
    kind: str
    geometry: dict[str, Any] = field(default_factory=dict)
    style: Style = Style()
    initial: Initial = Initial()


@dataclass(frozen=True)
class Action:
    """One timeline item. Kind-specific parameters live in `params`:

    appear     -> {"mode": fade|pop|none}
    disappear  -> {"mode": fade|none}
    translate  -> {"to": [x, y]} or {"alongPath": [[x, y], ...]}
    rotate     -> {"by": degrees, "about": "self" | [x, y]}
    scale      -> {"to": factor}
    recolor    -> {"to": [r, g, b, a]}
    morph      -> {"toGeometry": {"kind": ..., ...params}}
    """

    id: str
    entity_id: str
    kind: str
    start: float = 0.0
    duration: float = 0.0
    easing: str = "linear"
    repeat: int = 1
    params: dict[str, Any] = field(default_factory=dict)

    @property
    def effective_end(self) -> float:
        return self.start + self.duration * self.repeat


@dataclass(frozen=True)
class MotionProgram:
    canvas: Canvas = Canvas()
    entities: tuple[Entity, ...] = ()
    timeline: tuple[Action, ...] = ()
    version: int = 0

    def entity(self, entity_id: str) -> Entity:
        for e in self.entities:
            if e.id == entity_id:
                return e
        raise KeyError(entity_id)

    def total_duration(self) -> float:
        return max((a.effective_end for a in self.timeline), default=0.0)


@dataclass(frozen=True)
class EntityState:
    """Fully resolved visual state of one entity at some time."""

    position: Point
    rotation: float
    scale: float
    fill: RGBA
    opacity: float
    visible: bool
    geometry: dict[str, Any]


@dataclass(frozen=True)
class SceneState:
    time: float
    entities: dict[str, EntityState]


@dataclass(frozen=True)
class ActionChange:
    before: Optional[Action]
    after: Optional[Action]


@dataclass(frozen=True)
class ActionDiff:
    added: dict[str, ActionChange]
    removed: dict[str, ActionChange]
    modified: dict[str, ActionChange]
    entities_added: frozenset[str]
    entities_removed: frozenset[str]

    def is_empty(self) -> bool:
        return not (self.added or self.removed or self.modified
                    or self.entities_added or self.entities_removed)

    def changed_action_ids(self) -> set[str]:
        return set(self.added) | set(self.removed) | set(self.modified)


# --- validation -----------------------------------------------------------


def _check_color(value: Any, where: str) -> RGBA:
    if (not isinstance(value, (list, tuple)) or len(value) != 4
            or not all(is_finite(c) for c in value)):
        raise ValidationError("color must be 4 finite numbers", where)
    color = tuple(float(c) for c in value)
    if not all(0.0 <= c <= 1.0 for c in color):
        raise ValidationError("color components must be in [0,1]", where)
    return color  # type: ignore[return-value]


def _check_point(value: Any, where: str) -> Point:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(is_finite(c) for c in value)):
        raise ValidationError("point must be 2 finite numbers", where)
    return (float(value[0]), float(value[1]))


def validate_geometry(kind: str, geometry: dict[str, Any], where: str) -> None:
    if kind == "circle":
        r = geometry.get("radius")
        if not (is_finite(r) and r > 0):
            raise ValidationError("circle needs radius > 0", where + "/radius")
    elif kind == "rect":
        for key in ("width", "height"):
            v = geometry.get(key)
            if not (is_finite(v) and v > 0):
                raise ValidationError(f"rect needs {key} > 0", f"{where}/{key}")
    elif kind in ("polygon", "path"):
        pts = geometry.get("points")
        minimum = 3 if kind == "polygon" else 2
        if not isinstance(pts, (list, tuple)) or len(pts) < minimum:
            raise ValidationError(f"{kind} needs at least {minimum} points", where + "/points")
        for i, p in enumerate(pts):
            _check_point(p, f"{where}/points/{i}")
    elif kind == "text":
        if not isinstance(geometry.get("text"), str):
            raise ValidationError("text entity needs a text string", where + "/text")
        fs = geometry.get("fontSize", 32.0)
        if not (is_finite(fs) and fs > 0):
            raise ValidationError("fontSize must be > 0", where + "/fontSize")
    elif kind == "asset":
        if not isinstance(geometry.get("assetId"), str) or not geometry["assetId"]:
            raise ValidationError("asset entity needs assetId", where + "/assetId")
    else:
        raise ValidationError(f"unknown entity kind: {kind}", where)


def validate_entity(entity: Entity, where: str) -> None:
    if not entity.id:
        raise ValidationError("entity id must be non-empty", where + "/id")
    if entity.kind not in ENTITY_KINDS:
        raise ValidationError(f"unknown entity kind: {entity.kind}", where + "/kind")
    validate_geometry(entity.kind, entity.geometry, where + "/geometry")
    if not (0.0 <= entity.style.opacity <= 1.0):
        raise ValidationError("opacity must be in [0,1]", where + "/style/opacity")
    if not (is_finite(entity.initial.scale) and entity.initial.scale > 0):
        raise ValidationError("scale must be > 0", where + "/initial/scale")
    for v, name in ((entity.initial.position[0], "position"),
                    (entity.initial.position[1], "position"),
                    (entity.initial.rotation, "rotation")):
        if not is_finite(v):
            raise ValidationError(f"non-finite {name}", f"{where}/initial/{name}")


def validate_action(action: Action, entity_kinds: dict[str, str], where: str) -> None:
    if not action.id:
        raise ValidationError("action id must be non-empty", where + "/id")
    if action.entity_id not in entity_kinds:
        raise ValidationError(f"unknown entity id: {action.entity_id}", where + "/entityId")
    if action.kind not in ACTION_KINDS:
        raise ValidationError(f"unknown action kind: {action.kind}", where + "/kind")
    if not (is_finite(action.start) and action.start >= 0):
        raise ValidationError("start must be finite and >= 0", where + "/start")
    if not (is_finite(action.duration) and action.duration >= 0):
        raise ValidationError("duration must be finite and >= 0", where + "/duration")
    if action.easing not in EASINGS:
        raise ValidationError(f"unknown easing: {action.easing}", where + "/easing")
    if not isinstance(action.repeat, int) or action.repeat < 1:
        raise ValidationError("repeat must be an integer >= 1", where + "/repeat")

    p = action.params
    if action.kind == "appear":
        if p.get("mode", "fade") not in APPEAR_MODES:
            raise ValidationError("appear mode must be fade|pop|none", where + "/mode")
    elif action.kind == "disappear":
        if p.get("mode", "fade") not in DISAPPEAR_MODES:
            raise ValidationError("disappear mode must be fade|none", where + "/mode")
    elif action.kind == "translate":
        has_to = "to" in p
        has_path = "alongPath" in p
        if has_to == has_path:
            raise ValidationError("translate needs exactly one of to/alongPath", where)
        if has_to:
            _check_point(p["to"], where + "/to")
        else:
            path = p["alongPath"]
            if not isinstance(path, (list, tuple)) or len(path) < 2:
                raise ValidationError("alongPath needs at least 2 points", where + "/alongPath")
            for i, pt in enumerate(path):
                _check_point(pt, f"{where}/alongPath/{i}")
    elif action.kind == "rotate":
        if not is_finite(p.get("by")):
            raise ValidationError("rotate needs finite by-degrees", where + "/by")
        about = p.get("about", "self")
        if about != "self":
            _check_point(about, where + "/about")
    elif action.kind == "scale":
        if not (is_finite(p.get("to")) and p["to"] > 0):
            raise ValidationError("scale target must be > 0", where + "/to")
    elif action.kind == "recolor":
        _check_color(p.get("to"), where + "/to")
    elif action.kind == "morph":
        target = p.get("toGeometry")
        if not isinstance(target, dict):
            raise ValidationError("morph needs toGeometry", where + "/toGeometry")
        target_kind = target.get("kind")
        if target_kind not in MORPHABLE_KINDS:
            raise ValidationError("morph target must be a shape kind", where + "/toGeometry/kind")
        validate_geometry(target_kind, target, where + "/toGeometry")
        if entity_kinds[action.entity_id] not in MORPHABLE_KINDS:
            raise ValidationError("only shape entities can morph", where + "/entityId")


def validate_program(program: MotionProgram) -> None:
    if not (is_finite(program.canvas.width) and program.canvas.width > 0
            and is_finite(program.canvas.height) and program.canvas.height > 0):
        raise ValidationError("canvas must be positive", "/canvas")
    _check_color(program.canvas.background, "/canvas/background")
    if not isinstance(program.version, int) or program.version < 0:
        raise ValidationError("version must be an integer >= 0", "/version")
    kinds: dict[str, str] = {}
    for i, entity in enumerate(program.entities):
        validate_entity(entity, f"/entities/{i}")
        if entity.id in kinds:
            raise ValidationError(f"duplicate entity id: {entity.id}", f"/entities/{i}/id")
        kinds[entity.id] = entity.kind
    seen_actions: set[str] = set()
    for i, action in enumerate(program.timeline):
        validate_action(action, kinds, f"/timeline/{i}")
        if action.id in seen_actions:
            raise ValidationError(f"duplicate action id: {action.id}", f"/timeline/{i}/id")
        seen_actions.add(action.id)


def bump_version(program: MotionProgram, version: int) -> MotionProgram:
    return replace(program, version=version)
