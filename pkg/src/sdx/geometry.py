"""Small numeric helpers shared by the storyboard tools and the motion engine.

Everything here is pure; canonical number formatting lives here so that
every serialized artifact (programs, composites, frames) agrees on how a
float is written.
"""

from __future__ import annotations

import math

Point = tuple[float, float]
Box = tuple[float, float, float, float]  # (x0, y0, x1, y1), x0<=x1, y0<=y1


def q6(x: float) -> float:
    """Quantize to 6 decimal places (the canonical float resolution)."""
    return float(f"{float(x):.6f}")


def fmt_num(x: float) -> str:
    """Canonical textual form of a number: 6 decimals, trailing zeros dropped."""
    s = f"{float(x):.6f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def is_finite(x: float) -> bool:
    return isinstance(x, (int, float)) and math.isfinite(x)


def lerp(a: float, b: float, u: float) -> float:
    # a*(1-u) + b*u is exact at u=0 and u=1, unlike a + (b-a)*u.
    return a * (1.0 - u) + b * u


def lerp_point(a: Point, b: Point, u: float) -> Point:
    return (lerp(a[0], b[0], u), lerp(a[1], b[1], u))


def polyline_length(points: list[Point]) -> float:
    total = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        total += math.hypot(x1 - x0, y1 - y0)
    return total


def point_along_polyline(points: list[Point], u: float) -> Point:
    """Point at fraction u in [0, 1] of the polyline's arc length."""
    if len(points) == 1:
        return points[0]
    total = polyline_length(points)
    if total == 0.0:
        return points[0]
    target = u * total
    walked = 0.0
    for a, b in zip(points, points[1:]):
        seg = math.hypot(b[0] - a[0], b[1] - a[1])
        if seg > 0.0 and walked + seg >= target:
            return lerp_point(a, b, (target - walked) / seg)
        walked += seg
    return points[-1]


def resample_polyline(points: list[Point], n: int) -> list[Point]:
    """n points spaced equally by arc length, endpoints included."""
    if n < 2:
        raise ValueError("need at least 2 samples")
    if len(points) == 1:
        return [points[0]] * n
    lengths = [0.0]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        lengths.append(lengths[-1] + math.hypot(x1 - x0, y1 - y0))
    total = lengths[-1]
    if total == 0.0:
        return [points[0]] * n
    out: list[Point] = []
    seg = 0
    last = len(points) - 2
    for i in range(n):
        target = (i / (n - 1)) * total
        while seg < last and lengths[seg + 1] < target:
            seg += 1
        seg_len = lengths[seg + 1] - lengths[seg]
        if seg_len == 0.0:
            out.append(points[seg])
        else:
            out.append(lerp_point(points[seg], points[seg + 1],
                                  (target - lengths[seg]) / seg_len))
    return out


def rotate_point(p: Point, center: Point, degrees: float) -> Point:
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    dx, dy = p[0] - center[0], p[1] - center[1]
    return (center[0] + dx * c - dy * s, center[1] + dx * s + dy * c)


def bbox_of_points(points: list[Point]) -> Box:
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    return (min(xs), min(ys), max(xs), max(ys))


def boxes_intersect(a: Box, b: Box) -> bool:
    return a[0] <= b[2] and b[0] <= a[2] and a[1] <= b[3] and b[1] <= a[3]


def expand_box(box: Box, margin: float) -> Box:
    return (box[0] - margin, box[1] - margin, box[2] + margin, box[3] + margin)
