"""The DSL grammar document included verbatim in every generation prompt.

The digest of this text travels with every generation request so fixture
playback can detect grammar drift.
"""

from __future__ import annotations

import hashlib

GRAMMAR_TEXT = """\
MOTION PROGRAM GRAMMAR (JSON)

A motion program is a single JSON object:

  {
    "canvas": {"width": W, "height": H, "background": [r, g, b, a]},
    "entities": [Entity, ...],
    "timeline": [Action, ...],
    "version": integer >= 0
  }

Coordinates are canvas units, origin top-left, y-axis down. The default
canvas is 1600 x 900. Colors are [r, g, b, a] with every component in
[0, 1]. All times are seconds.

Entity:
  {
    "id": unique string,
    "kind": "circle" | "rect" | "polygon" | "path" | "text" | "asset",
    "geometry":
        circle  -> {"radius": > 0}
        rect    -> {"width": > 0, "height": > 0}
        polygon -> {"points": [[x, y], ...]}   # >= 3 points, local coords
        path    -> {"points": [[x, y], ...]}   # >= 2 points, local coords
        text    -> {"text": string, "fontSize": > 0}
        asset   -> {"assetId": string}         # an uploaded vector asset
    "style": {"fill": color, "stroke": color, "strokeWidth": >= 0,
              "opacity": 0..1},
    "initial": {"position": [x, y], "rotation": degrees, "scale": > 0,
                "visible": true | false}
  }

Shape geometry is local to the entity's position; circles and rects are
centered on it.

Action (every action targets one entity and owns one time interval):
  common fields:
    "id": unique string, "entityId": an entity id,
    "start": seconds >= 0, "duration": seconds >= 0,
    "easing": "linear" | "easeIn" | "easeOut" | "easeInOut",
    "repeat": integer >= 1 (the motion replays this many times)
  kind-specific fields:
    {"kind": "appear",    "mode": "fade" | "pop" | "none"}
    {"kind": "disappear", "mode": "fade" | "none"}
    {"kind": "translate", "to": [x, y]}            # straight-line move
    {"kind": "translate", "alongPath": [[x, y], ...]}  # >= 2 waypoints
    {"kind": "rotate",    "by": degrees, "about": "self" | [x, y]}
    {"kind": "scale",     "to": factor > 0}
    {"kind": "recolor",   "to": color}
    {"kind": "morph",     "toGeometry": {"kind": shape-kind, ...params}}

Entities that should enter later start with "visible": false and are
brought in with an appear action. Overlapping actions on one property:
the latest-started action wins.

Emit programs as a single JSON object with no comments.
"""

GRAMMAR_DIGEST = hashlib.sha256(GRAMMAR_TEXT.encode("utf-8")).hexdigest()
