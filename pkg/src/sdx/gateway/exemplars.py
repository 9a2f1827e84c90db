"""Few-shot exemplars: sketch description paired with the program it maps to.

Three small pairs covering movement, staged appearance and shape change.
They are parsed at import time, so a grammar change that breaks them
fails fast.
"""

from __future__ import annotations

from ..motion.parser import from_jsonable, print_program

_EXEMPLAR_SPECS = [
    (
        "One frame: a filled circle on the left, an arrow pointing right, "
        "a dashed circle outline on the right (the future position).",
        {
            "canvas": {"width": 1600.0, "height": 900.0, "background": [1, 1, 1, 1]},
            "entities": [
                {
                    "id": "ball",
                    "kind": "circle",
                    "geometry": {"radius": 60.0},
                    "style": {"fill": [0.2, 0.4, 0.9, 1.0], "stroke": [0, 0, 0, 0],
                              "strokeWidth": 0.0, "opacity": 1.0},
                    "initial": {"position": [300.0, 450.0], "rotation": 0.0,
                                "scale": 1.0, "visible": True},
                }
            ],
            "timeline": [
                {"id": "move", "entityId": "ball", "kind": "translate",
                 "to": [1300.0, 450.0], "start": 0.0, "duration": 2.0,
                 "easing": "easeInOut", "repeat": 1}
            ],
            "version": 0,
        },
    ),
    (
        "Frame 1: empty box. Frame 2: the box plus a star above it with "
        "motion lines, note says 'star pops in, then spins'.",
        {
            "canvas": {"width": 1600.0, "height": 900.0, "background": [1, 1, 1, 1]},
            "entities": [
                {
                    "id": "box",
                    "kind": "rect",
                    "geometry": {"width": 300.0, "height": 200.0},
                    "style": {"fill": [0.9, 0.9, 0.9, 1.0], "stroke": [0, 0, 0, 1],
                              "strokeWidth": 4.0, "opacity": 1.0},
                    "initial": {"position": [800.0, 600.0], "rotation": 0.0,
                                "scale": 1.0, "visible": True},
                },
                {
                    "id": "star",
                    "kind": "polygon",
                    "geometry": {"points": [[0.0, -80.0], [24.0, -24.0], [80.0, -24.0],
                                            [36.0, 12.0], [48.0, 72.0], [0.0, 40.0],
                                            [-48.0, 72.0], [-36.0, 12.0], [-80.0, -24.0],
                                            [-24.0, -24.0]]},
                    "style": {"fill": [1.0, 0.8, 0.1, 1.0], "stroke": [0, 0, 0, 0],
                              "strokeWidth": 0.0, "opacity": 1.0},
                    "initial": {"position": [800.0, 300.0], "rotation": 0.0,
                                "scale": 1.0, "visible": False},
                },
            ],
            "timeline": [
                {"id": "star-in", "entityId": "star", "kind": "appear", "mode": "pop",
                 "start": 0.5, "duration": 0.6, "easing": "easeOut", "repeat": 1},
                {"id": "star-spin", "entityId": "star", "kind": "rotate", "by": 360.0,
                 "about": "self", "start": 1.2, "duration": 1.5,
                 "easing": "easeInOut", "repeat": 1},
            ],
            "version": 0,
        },
    ),
    (
        "A square with an arrow to a triangle, note 'smooth change'; the "
        "triangle then fades away.",
        {
            "canvas": {"width": 1600.0, "height": 900.0, "background": [1, 1, 1, 1]},
            "entities": [
                {
                    "id": "shape",
                    "kind": "rect",
                    "geometry": {"width": 240.0, "height": 240.0},
                    "style": {"fill": [0.8, 0.3, 0.3, 1.0], "stroke": [0, 0, 0, 0],
                              "strokeWidth": 0.0, "opacity": 1.0},
                    "initial": {"position": [800.0, 450.0], "rotation": 0.0,
                                "scale": 1.0, "visible": True},
                }
            ],
            "timeline": [
                {"id": "to-triangle", "entityId": "shape", "kind": "morph",
                 "toGeometry": {"kind": "polygon",
                                "points": [[0.0, -140.0], [120.0, 100.0], [-120.0, 100.0]]},
                 "start": 0.0, "duration": 1.5, "easing": "easeInOut", "repeat": 1},
                {"id": "fade-out", "entityId": "shape", "kind": "disappear",
                 "mode": "fade", "start": 2.0, "duration": 1.0,
                 "easing": "linear", "repeat": 1},
            ],
            "version": 0,
        },
    ),
]

EXEMPLARS: tuple[tuple[str, str], ...] = tuple(
    (description, print_program(from_jsonable(raw)))
    for description, raw in _EXEMPLAR_SPECS
)
