"""Closed-form evaluation of scene state at an arbitrary time.

Semantics, per entity and per channel:

* channels are position, rotation, scale, fill, visibility (opacity and
  the visible flag travel together) and geometry;
* completed actions (t >= start + duration*repeat) commit their end value
  to the channel base, folded in (start, timeline index) order;
* among the not-yet-completed actions that have started, the one with the
  greatest (start, timeline index) governs each channel it touches and
  interpolates from the folded base using its easing;
* repeat replays the action's cycle: progress is the fractional part of
  (t - start) / duration within the current cycle;
* entities begin at their declared initial values.

evaluate_at is a pure function of (program, t): random access at any time
must equal stepping monotonically through earlier times.
"""

from __future__ import annotations

import math
from typing import Any

from ..errors import NonFiniteTime
from ..geometry import lerp, point_along_polyline, resample_polyline, rotate_point
from .model import Action, Entity, EntityState, MotionProgram, SceneState

CHANNELS = ("position", "rotation", "scale", "fill", "visibility", "geometry")

MORPH_SAMPLES = 64


def ease(name: str, u: float) -> float:
    if name == "linear":
        return u
    if name == "easeIn":
        return u * u
    if name == "easeOut":
        return 1.0 - (1.0 - u) * (1.0 - u)
    if name == "easeInOut":
        return u * u * (3.0 - 2.0 * u)
    raise ValueError(f"unknown easing: {name}")


def frac_in_cycle(action: Action, t: float) -> float:
    """Progress in [0, 1) within the current repeat cycle."""
    raw = (t - action.start) / action.duration
    return raw - math.floor(raw)


def action_channels(action: Action) -> tuple[str, ...]:
    kind = action.kind
    if kind == "appear":
        if action.params.get("mode", "fade") == "pop":
            return ("visibility", "scale")
        return ("visibility",)
    if kind == "disappear":
        return ("visibility",)
    if kind == "translate":
        return ("position",)
    if kind == "rotate":
        if action.params.get("about", "self") == "self":
            return ("rotation",)
        return ("rotation", "position")
    if kind == "scale":
        return ("scale",)
    if kind == "recolor":
        return ("fill",)
    if kind == "morph":
        return ("geometry",)
    raise ValueError(f"unknown action kind: {kind}")


class ChannelBase:
    """Mutable fold accumulator for one entity's channel values."""

    __slots__ = ("position", "rotation", "scale", "fill", "opacity", "visible", "geometry")

    def __init__(self, entity: Entity):
        self.position = entity.initial.position
        self.rotation = entity.initial.rotation
        self.scale = entity.initial.scale
        self.fill = entity.style.fill
        self.opacity = entity.style.opacity
        self.visible = entity.initial.visible
        self.geometry = dict(entity.geometry, kind=entity.kind)


def commit(action: Action, base: ChannelBase) -> None:
    """Apply an action's end state to the channel base, in place."""
    kind = action.kind
    p = action.params
    if kind == "appear":
        base.visible = True
    elif kind == "disappear":
        base.visible = False
    elif kind == "translate":
        if "to" in p:
            base.position = (p["to"][0], p["to"][1])
        else:
            path = p["alongPath"]
            base.position = (path[-1][0], path[-1][1])
    elif kind == "rotate":
        by = p["by"]
        about = p.get("about", "self")
        if about != "self":
            base.position = rotate_point(base.position, (about[0], about[1]), by)
        base.rotation = base.rotation + by
    elif kind == "scale":
        base.scale = p["to"]
    elif kind == "recolor":
        base.fill = tuple(p["to"])
    elif kind == "morph":
        base.geometry = dict(p["toGeometry"])


def outline_points(geometry: dict[str, Any]) -> tuple[list, bool]:
    """(points, closed) outline of a shape geometry for morph blending."""
    kind = geometry["kind"]
    if kind == "circle":
        r = geometry["radius"]
        pts = [(r * math.cos(2.0 * math.pi * k / MORPH_SAMPLES),
                r * math.sin(2.0 * math.pi * k / MORPH_SAMPLES))
               for k in range(MORPH_SAMPLES)]
        return pts, True
    if kind == "rect":
        w, h = geometry["width"] / 2.0, geometry["height"] / 2.0
        return [(-w, -h), (w, -h), (w, h), (-w, h)], True
    if kind == "polygon":
        return [(p[0], p[1]) for p in geometry["points"]], True
    if kind == "path":
        return [(p[0], p[1]) for p in geometry["points"]], False
    raise ValueError(f"cannot outline geometry kind: {kind}")


def resample_outline(geometry: dict[str, Any], n: int) -> list:
    pts, closed = outline_points(geometry)
    if closed:
        ring = pts + [pts[0]]
        return resample_polyline(ring, n + 1)[:n]
    return resample_polyline(pts, n)


def morph_blend(src: dict[str, Any], dst: dict[str, Any], w: float) -> dict[str, Any]:
    a = resample_outline(src, MORPH_SAMPLES)
    b = resample_outline(dst, MORPH_SAMPLES)
    pts = [[lerp(pa[0], pb[0], w), lerp(pa[1], pb[1], w)] for pa, pb in zip(a, b)]
    kind = "path" if (src["kind"] == "path" or dst["kind"] == "path") else "polygon"
    return {"kind": kind, "points": pts}


def apply_active(action: Action, channel: str, base: ChannelBase, t: float) -> None:
    """Write the governor's interpolated value for one channel, in place."""
    u = frac_in_cycle(action, t)
    w = ease(action.easing, u)
    p = action.params
    kind = action.kind
    if kind == "appear":
        mode = p.get("mode", "fade")
        if channel == "visibility":
            base.visible = True
            if mode == "fade" or mode == "pop":
                base.opacity = base.opacity * w
        elif channel == "scale":
            # pop grows from nothing to the base scale, always easeOut
            base.scale = base.scale * ease("easeOut", u)
    elif kind == "disappear":
        if p.get("mode", "fade") == "fade":
            base.opacity = base.opacity * (1.0 - w)
        else:
            base.visible = False
    elif kind == "translate":
        if "to" in p:
            base.position = (lerp(base.position[0], p["to"][0], w),
                             lerp(base.position[1], p["to"][1], w))
        else:
            path = [(pt[0], pt[1]) for pt in p["alongPath"]]
            base.position = point_along_polyline(path, w)
    elif kind == "rotate":
        by = p["by"]
        about = p.get("about", "self")
        if channel == "position":
            base.position = rotate_point(base.position, (about[0], about[1]), w * by)
        else:
            base.rotation = base.rotation + w * by
    elif kind == "scale":
        base.scale = lerp(base.scale, p["to"], w)
    elif kind == "recolor":
        base.fill = tuple(lerp(c, target, w) for c, target in zip(base.fill, p["to"]))
    elif kind == "morph":
        base.geometry = morph_blend(base.geometry, p["toGeometry"], w)


def evaluate_at(program: MotionProgram, t: float) -> SceneState:
    """Resolve every entity's visual state at time t seconds."""
    if isinstance(t, bool) or not isinstance(t, (int, float)) or not math.isfinite(t) or t < 0:
        raise NonFiniteTime(f"time must be finite and >= 0, got {t!r}")
    t = float(t)

    indexed = list(enumerate(program.timeline))
    by_entity: dict[str, list[tuple[int, Action]]] = {}
    for idx, action in indexed:
        by_entity.setdefault(action.entity_id, []).append((idx, action))

    states: dict[str, EntityState] = {}
    for entity in program.entities:
        base = ChannelBase(entity)
        actions = by_entity.get(entity.id, [])

        completed = [(idx, a) for idx, a in actions if t >= a.effective_end]
        completed.sort(key=lambda pair: (pair[1].start, pair[0]))
        for _, action in completed:
            commit(action, base)

        active = [(idx, a) for idx, a in actions if a.start <= t < a.effective_end]
        governors: dict[str, tuple[float, int, Action]] = {}
        for idx, action in active:
            for channel in action_channels(action):
                rank = (action.start, idx)
                best = governors.get(channel)
                if best is None or rank > (best[0], best[1]):
                    governors[channel] = (action.start, idx, action)
        for channel, (_, _, action) in sorted(governors.items()):
            apply_active(action, channel, base, t)

        states[entity.id] = EntityState(
            position=base.position,
            rotation=base.rotation,
            scale=base.scale,
            fill=base.fill,
            opacity=base.opacity,
            visible=base.visible,
            geometry=base.geometry,
        )
    return SceneState(time=t, entities=states)
