"""Serialize a resolved scene state into one SVG frame.

Output is byte-deterministic: fixed attribute order, canonical number
formatting, entities drawn in program order. Asset entities embed their
vector document when an asset resolver is supplied, otherwise a stable
placeholder group is emitted so programs remain renderable stand-alone.
"""

from __future__ import annotations

from typing import Callable, Optional

from ..geometry import Box, fmt_num, rotate_point
from .engine import evaluate_at, resample_outline
from .model import Entity, EntityState, MotionProgram, SceneState

AssetResolver = Callable[[str], Optional[str]]


def rgb_css(color) -> str:
    r, g, b = (fmt_num(c * 255.0) for c in color[:3])
    return f"rgb({r},{g},{b})"


def escape_xml(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _shape_markup(state: EntityState, entity: Entity,
                  assets: Optional[AssetResolver]) -> str:
    geometry = state.geometry
    kind = geometry["kind"]
    if kind == "circle":
        return f'<circle cx="0" cy="0" r="{fmt_num(geometry["radius"])}"/>'
    if kind == "rect":
        w, h = geometry["width"], geometry["height"]
        return (f'<rect x="{fmt_num(-w / 2.0)}" y="{fmt_num(-h / 2.0)}" '
                f'width="{fmt_num(w)}" height="{fmt_num(h)}"/>')
    if kind == "polygon":
        pts = " ".join(f"{fmt_num(x)},{fmt_num(y)}" for x, y in geometry["points"])
        return f'<polygon points="{pts}"/>'
    if kind == "path":
        pts = geometry["points"]
        d = "M " + " L ".join(f"{fmt_num(x)} {fmt_num(y)}" for x, y in pts)
        return f'<path d="{d}"/>'
    if kind == "text":
        fs = geometry.get("fontSize", 32.0)
        return (f'<text x="0" y="0" font-size="{fmt_num(fs)}" font-family="sans-serif" '
                f'text-anchor="middle" dominant-baseline="central">'
                f'{escape_xml(geometry["text"])}</text>')
    if kind == "asset":
        asset_id = geometry["assetId"]
        doc = assets(asset_id) if assets is not None else None
        if doc is None:
            return f'<g data-asset="{escape_xml(asset_id)}"/>'
        if doc.lstrip().startswith("<?xml"):
            doc = doc[doc.index("?>") + 2:].lstrip()
        return f'<g data-asset="{escape_xml(asset_id)}">{doc}</g>'
    raise ValueError(f"cannot render geometry kind: {kind}")


def _entity_markup(entity: Entity, state: EntityState,
                   assets: Optional[AssetResolver]) -> str:
    x, y = state.position
    transform = f"translate({fmt_num(x)} {fmt_num(y)})"
    if state.rotation != 0.0:
        transform += f" rotate({fmt_num(state.rotation)})"
    if state.scale != 1.0:
        transform += f" scale({fmt_num(state.scale)})"
    style = entity.style
    attrs = [
        f'id="{escape_xml(entity.id)}"',
        f'transform="{transform}"',
        f'opacity="{fmt_num(state.opacity)}"',
        f'fill="{rgb_css(state.fill)}"',
        f'fill-opacity="{fmt_num(state.fill[3])}"',
    ]
    if style.stroke_width > 0.0 and style.stroke[3] > 0.0:
        attrs.append(f'stroke="{rgb_css(style.stroke)}"')
        attrs.append(f'stroke-opacity="{fmt_num(style.stroke[3])}"')
        attrs.append(f'stroke-width="{fmt_num(style.stroke_width)}"')
    return f'<g {" ".join(attrs)}>{_shape_markup(state, entity, assets)}</g>'


def scene_svg(program: MotionProgram, state: SceneState,
              assets: Optional[AssetResolver] = None) -> str:
    """One SVG document for a resolved scene state."""
    canvas = program.canvas
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{fmt_num(canvas.width)}" height="{fmt_num(canvas.height)}" '
        f'viewBox="0 0 {fmt_num(canvas.width)} {fmt_num(canvas.height)}">',
        f'<rect x="0" y="0" width="{fmt_num(canvas.width)}" height="{fmt_num(canvas.height)}" '
        f'fill="{rgb_css(canvas.background)}" fill-opacity="{fmt_num(canvas.background[3])}"/>',
    ]
    for entity in program.entities:
        entity_state = state.entities[entity.id]
        if not entity_state.visible:
            continue
        parts.append(_entity_markup(entity, entity_state, assets))
    parts.append("</svg>")
    return "\n".join(parts)


def frame_svg(program: MotionProgram, t: float,
              assets: Optional[AssetResolver] = None) -> str:
    return scene_svg(program, evaluate_at(program, t), assets)


def entity_bbox(state: EntityState, entity: Entity) -> Box:
    """Axis-aligned bounding box of an entity's transformed outline."""
    geometry = state.geometry
    kind = geometry["kind"]
    if kind == "text":
        fs = geometry.get("fontSize", 32.0)
        half_w = 0.3 * fs * max(1, len(geometry.get("text", ""))) / 2.0
        local = [(-half_w, -fs / 2.0), (half_w, -fs / 2.0),
                 (half_w, fs / 2.0), (-half_w, fs / 2.0)]
    elif kind == "asset":
        # no intrinsic size available; assume a nominal 100x100 box
        local = [(-50.0, -50.0), (50.0, -50.0), (50.0, 50.0), (-50.0, 50.0)]
    else:
        local = resample_outline(geometry, 32)
    s = state.scale
    placed = []
    for lx, ly in local:
        px, py = lx * s + state.position[0], ly * s + state.position[1]
        placed.append(rotate_point((px, py), state.position, state.rotation))
    xs = [p[0] for p in placed]
    ys = [p[1] for p in placed]
    return (min(xs), min(ys), max(xs), max(ys))
