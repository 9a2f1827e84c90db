"""Sketch storyboards: strokes, frames, composites and region fingerprints.

A storyboard is the user's input artifact: an ordered list of sketch
frames (free-hand polylines plus an optional short script note). This
module turns a storyboard into the single composite image handed to the
interpreter, exports individual frames, and computes the stable region
fingerprints used as keys by the disambiguation memory.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from typing import Any, Optional

from .errors import EmptyStoryboard, UnsupportedFormat, ValidationError
from .geometry import Box, Point, bbox_of_points, fmt_num, is_finite, resample_polyline

# One logical coordinate system end-to-end: canvas units, y-axis down.
CANVAS_WIDTH = 1600.0
CANVAS_HEIGHT = 900.0

# Composite layout: each frame cell is a 800x450 drawing area above a
# 40-unit label band holding "Frame k" and the frame's script.
CELL_WIDTH = 800.0
CELL_HEIGHT = 450.0
LABEL_BAND = 40.0

MAX_SCRIPT_LEN = 500

# Fingerprint normalization: 32 resample points per stroke, 16-unit grid.
# Grid chosen so hand-drawn jitter within ~8 units maps to the same cell.
FINGERPRINT_SAMPLES = 32
FINGERPRINT_GRID = 16.0

RGBA = tuple[float, float, float, float]


@dataclass(frozen=True)
class Stroke:
    """A single free-hand polyline in canvas units."""

    points: tuple[Point, ...]
    color: RGBA = (0.0, 0.0, 0.0, 1.0)
    width: float = 3.0
    seq: int = 0


@dataclass(frozen=True)
class SketchFrame:
    strokes: tuple[Stroke, ...] = ()
    script: str = ""
    index: int = 0


@dataclass(frozen=True)
class AssetRef:
    """An uploaded reference vector document, content-addressed."""

    id: str
    name: str
    svg: str
    sha256: str


@dataclass(frozen=True)
class Storyboard:
    id: str
    frames: tuple[SketchFrame, ...] = ()
    canvas_size: tuple[float, float] = (CANVAS_WIDTH, CANVAS_HEIGHT)
    assets: tuple[AssetRef, ...] = ()


@dataclass(frozen=True)
class Fingerprint:
    """Stable digest of normalized stroke geometry within a frame region."""

    digest: str
    frame_index: int
    region: Optional[Box] = None


@dataclass(frozen=True)
class CompositeImage:
    """The single vector document fed to the interpreter."""

    svg: str
    # frame index -> (x, y, w, h) cell rectangle, label band included
    manifest: dict[int, tuple[float, float, float, float]]
    width: float
    height: float


# --- validation ----------------------------------------------------------


def validate_stroke(stroke: Stroke, where: str = "") -> None:
    if len(stroke.points) < 2:
        raise ValidationError("stroke needs at least 2 points", where + "/points")
    for i, (x, y) in enumerate(stroke.points):
        if not (is_finite(x) and is_finite(y)):
            raise ValidationError("non-finite coordinate", f"{where}/points/{i}")
    if not (is_finite(stroke.width) and stroke.width > 0):
        raise ValidationError("width must be > 0", where + "/width")
    if stroke.seq < 0:
        raise ValidationError("seq must be >= 0", where + "/seq")


def validate_frame(frame: SketchFrame, where: str = "") -> None:
    seen: set[int] = set()
    for i, stroke in enumerate(frame.strokes):
        validate_stroke(stroke, f"{where}/strokes/{i}")
        if stroke.seq in seen:
            raise ValidationError(f"duplicate seq {stroke.seq}", f"{where}/strokes/{i}/seq")
        seen.add(stroke.seq)
    if len(frame.script) > MAX_SCRIPT_LEN:
        raise ValidationError(f"script longer than {MAX_SCRIPT_LEN} chars", where + "/script")


def validate_storyboard(sb: Storyboard) -> None:
    w, h = sb.canvas_size
    if not (is_finite(w) and is_finite(h) and w > 0 and h > 0):
        raise ValidationError("canvasSize must be positive", "/canvasSize")
    for i, frame in enumerate(sb.frames):
        if frame.index != i:
            raise ValidationError(f"frame index {frame.index} at position {i}", f"/frames/{i}/index")
        validate_frame(frame, f"/frames/{i}")
    for i, asset in enumerate(sb.assets):
        validate_asset(asset, f"/assets/{i}")


def validate_asset(asset: AssetRef, where: str = "") -> None:
    try:
        ET.fromstring(asset.svg)
    except ET.ParseError as exc:
        raise ValidationError(f"asset is not well-formed XML: {exc}", where + "/svg")
    digest = hashlib.sha256(asset.svg.encode("utf-8")).hexdigest()
    if digest != asset.sha256:
        raise ValidationError("sha256 does not match content", where + "/sha256")


def make_asset(asset_id: str, name: str, svg: str) -> AssetRef:
    asset = AssetRef(id=asset_id, name=name, svg=svg,
                     sha256=hashlib.sha256(svg.encode("utf-8")).hexdigest())
    validate_asset(asset)
    return asset


# --- .sdproj serialization ------------------------------------------------


def storyboard_to_jsonable(sb: Storyboard) -> dict[str, Any]:
    return {
        "id": sb.id,
        "canvasSize": list(sb.canvas_size),
        "frames": [frame_to_jsonable(f) for f in sb.frames],
        "assets": [
            {"id": a.id, "name": a.name, "sha256": a.sha256, "svg": a.svg}
            for a in sb.assets
        ],
    }


def frame_to_jsonable(frame: SketchFrame) -> dict[str, Any]:
    return {
        "index": frame.index,
        "script": frame.script,
        "strokes": [
            {
                "points": [list(p) for p in s.points],
                "color": list(s.color),
                "width": s.width,
                "seq": s.seq,
            }
            for s in frame.strokes
        ],
    }


def save_storyboard(sb: Storyboard) -> str:
    validate_storyboard(sb)
    return json.dumps(storyboard_to_jsonable(sb), sort_keys=True, indent=2)


def frame_from_jsonable(raw: Any, where: str = "") -> SketchFrame:
    if not isinstance(raw, dict):
        raise ValidationError("frame must be an object", where)
    strokes = []
    for j, s in enumerate(raw.get("strokes", [])):
        pts = tuple((float(x), float(y)) for x, y in s.get("points", []))
        color = tuple(float(c) for c in s.get("color", (0, 0, 0, 1)))
        if len(color) != 4:
            raise ValidationError("color must be RGBA", f"{where}/strokes/{j}/color")
        strokes.append(Stroke(points=pts, color=color, width=float(s.get("width", 3.0)),
                              seq=int(s.get("seq", j))))
    frame = SketchFrame(strokes=tuple(strokes), script=str(raw.get("script", "")),
                        index=int(raw.get("index", 0)))
    validate_frame(frame, where)
    return frame


def load_storyboard(text: str) -> Storyboard:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"not valid JSON: {exc}", "")
    if not isinstance(raw, dict):
        raise ValidationError("storyboard must be an object", "")
    size = raw.get("canvasSize", [CANVAS_WIDTH, CANVAS_HEIGHT])
    frames = tuple(frame_from_jsonable(f, f"/frames/{i}")
                   for i, f in enumerate(raw.get("frames", [])))
    assets = tuple(
        AssetRef(id=str(a["id"]), name=str(a.get("name", a["id"])),
                 svg=str(a["svg"]), sha256=str(a["sha256"]))
        for a in raw.get("assets", [])
    )
    sb = Storyboard(id=str(raw.get("id", "storyboard")), frames=frames,
                    canvas_size=(float(size[0]), float(size[1])), assets=assets)
    validate_storyboard(sb)
    return sb


# --- composite ------------------------------------------------------------


def grid_shape(n_frames: int) -> tuple[int, int]:
    """(cols, rows) of the composite grid: cols = ceil(sqrt(N))."""
    cols = math.ceil(math.sqrt(n_frames))
    rows = math.ceil(n_frames / cols)
    return cols, rows


def composite_storyboard(sb: Storyboard) -> CompositeImage:
    """Lay all frames out in a grid inside one SVG document.

    Byte-deterministic: equal storyboards produce identical bytes.
    """
    validate_storyboard(sb)
    if not sb.frames:
        raise EmptyStoryboard("storyboard has no frames")

    cols, rows = grid_shape(len(sb.frames))
    cell_h = CELL_HEIGHT + LABEL_BAND
    total_w = cols * CELL_WIDTH
    total_h = rows * cell_h
    sx = CELL_WIDTH / sb.canvas_size[0]
    sy = CELL_HEIGHT / sb.canvas_size[1]

    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{fmt_num(total_w)}" height="{fmt_num(total_h)}" '
        f'viewBox="0 0 {fmt_num(total_w)} {fmt_num(total_h)}">',
        f'<rect x="0" y="0" width="{fmt_num(total_w)}" height="{fmt_num(total_h)}" fill="white"/>',
    ]
    manifest: dict[int, tuple[float, float, float, float]] = {}
    for frame in sb.frames:
        col = frame.index % cols
        row = frame.index // cols
        x0 = col * CELL_WIDTH
        y0 = row * cell_h
        manifest[frame.index] = (x0, y0, CELL_WIDTH, cell_h)
        parts.append(f'<g transform="translate({fmt_num(x0)} {fmt_num(y0)})">')
        parts.append(
            f'<rect x="0" y="0" width="{fmt_num(CELL_WIDTH)}" height="{fmt_num(CELL_HEIGHT)}" '
            'fill="none" stroke="#cccccc" stroke-width="1"/>'
        )
        for stroke in sorted(frame.strokes, key=lambda s: s.seq):
            scaled = [(p[0] * sx, p[1] * sy) for p in stroke.points]
            parts.append(_stroke_path(scaled, stroke.color, stroke.width * (sx + sy) / 2.0))
        label_y = CELL_HEIGHT + 16.0
        parts.append(
            f'<text x="4" y="{fmt_num(label_y)}" font-size="14" font-family="sans-serif" '
            f'fill="black">Frame {frame.index + 1}</text>'
        )
        if frame.script:
            parts.append(
                f'<text x="4" y="{fmt_num(label_y + 18.0)}" font-size="12" '
                f'font-family="sans-serif" fill="#333333">{escape_xml(frame.script)}</text>'
            )
        parts.append("</g>")
    parts.append("</svg>")
    return CompositeImage(svg="\n".join(parts), manifest=manifest, width=total_w, height=total_h)


def _stroke_path(points: list[Point], color: RGBA, width: float) -> str:
    d = "M " + " L ".join(f"{fmt_num(x)} {fmt_num(y)}" for x, y in points)
    return (
        f'<path d="{d}" fill="none" stroke="{rgb_css(color)}" '
        f'stroke-opacity="{fmt_num(color[3])}" stroke-width="{fmt_num(width)}" '
        'stroke-linecap="round" stroke-linejoin="round"/>'
    )


def rgb_css(color: RGBA) -> str:
    r, g, b = (fmt_num(c * 255.0) for c in color[:3])
    return f"rgb({r},{g},{b})"


def escape_xml(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
        .replace('"', "&quot;")
    )


# --- frame export ---------------------------------------------------------


def frame_svg(frame: SketchFrame, canvas_size: tuple[float, float] = (CANVAS_WIDTH, CANVAS_HEIGHT)) -> str:
    w, h = canvas_size
    parts = [
        '<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{fmt_num(w)}" height="{fmt_num(h)}" viewBox="0 0 {fmt_num(w)} {fmt_num(h)}">'
    ]
    for stroke in sorted(frame.strokes, key=lambda s: s.seq):
        parts.append(_stroke_path(list(stroke.points), stroke.color, stroke.width))
    parts.append("</svg>")
    return "\n".join(parts)


def export_frame(frame: SketchFrame, fmt: str,
                 canvas_size: tuple[float, float] = (CANVAS_WIDTH, CANVAS_HEIGHT)) -> bytes:
    """Export one frame as svg, json (lossless) or png (raster at canvas size)."""
    validate_frame(frame)
    if fmt == "svg":
        return frame_svg(frame, canvas_size).encode("utf-8")
    if fmt == "json":
        return json.dumps(frame_to_jsonable(frame), sort_keys=True, indent=2).encode("utf-8")
    if fmt == "png":
        return _rasterize_frame(frame, canvas_size)
    raise UnsupportedFormat(f"unknown export format: {fmt}")


def import_frame(data: bytes) -> SketchFrame:
    return frame_from_jsonable(json.loads(data.decode("utf-8")))


def _rasterize_frame(frame: SketchFrame, canvas_size: tuple[float, float]) -> bytes:
    from PIL import Image, ImageDraw

    w, h = int(round(canvas_size[0])), int(round(canvas_size[1]))
    image = Image.new("RGBA", (w, h), (255, 255, 255, 255))
    draw = ImageDraw.Draw(image)
    for stroke in sorted(frame.strokes, key=lambda s: s.seq):
        rgba = tuple(int(round(c * 255)) for c in stroke.color)
        width = max(1, int(round(stroke.width)))
        draw.line([tuple(p) for p in stroke.points], fill=rgba, width=width, joint="curve")
    buf = io.BytesIO()
    image.save(buf, format="PNG")
    return buf.getvalue()


# --- fingerprints ----------------------------------------------------------


def _overlap(stroke: Stroke, region: Box) -> bool:
    x0, y0, x1, y1 = bbox_of_points(list(stroke.points))
    return x0 <= region[2] and region[0] <= x1 and y0 <= region[3] and region[1] <= y1


def fingerprint_region(frame: SketchFrame, region: Optional[Box] = None) -> Fingerprint:
    """Digest of the normalized stroke geometry (within region, if given).

    Normalization: resample each stroke to 32 equidistant points, snap
    coordinates to a 16-unit grid, sort strokes by their quantized point
    sequence. Invariant under stroke reordering and sub-cell jitter.
    """
    validate_frame(frame)
    strokes = [s for s in frame.strokes if region is None or _overlap(s, region)]
    normalized = []
    for stroke in strokes:
        samples = resample_polyline(list(stroke.points), FINGERPRINT_SAMPLES)
        cells = [(math.floor(x / FINGERPRINT_GRID), math.floor(y / FINGERPRINT_GRID))
                 for x, y in samples]
        normalized.append(cells)
    normalized.sort()
    payload = json.dumps(normalized, separators=(",", ":")).encode("ascii")
    return Fingerprint(digest=hashlib.sha256(payload).hexdigest(),
                       frame_index=frame.index, region=region)


def region_in_frame(composite: CompositeImage, frame_index: int,
                    region: Optional[Box], canvas_size: tuple[float, float]) -> Optional[Box]:
    """Map a box in composite coordinates back into frame canvas coordinates."""
    if region is None:
        return None
    cell = composite.manifest.get(frame_index)
    if cell is None:
        return None
    cx, cy, _, _ = cell
    sx = canvas_size[0] / CELL_WIDTH
    sy = canvas_size[1] / CELL_HEIGHT
    x0 = (region[0] - cx) * sx
    y0 = (region[1] - cy) * sy
    x1 = (region[2] - cx) * sx
    y1 = (region[3] - cy) * sy
    return (min(x0, x1), min(y0, y1), max(x0, x1), max(y0, y1))


def frame_with_stroke(frame: SketchFrame, stroke: Stroke) -> SketchFrame:
    return replace(frame, strokes=frame.strokes + (stroke,))
