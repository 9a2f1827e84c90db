"""Motion program DSL: model, parser, evaluator, renderer, diff."""

from .diffing import diff, diff_jsonable
from .engine import evaluate_at
from .grammar import GRAMMAR_DIGEST, GRAMMAR_TEXT
from .model import (
    Action,
    ActionDiff,
    Canvas,
    Entity,
    EntityState,
    Initial,
    MotionProgram,
    SceneState,
    Style,
    bump_version,
    validate_program,
)
from .parser import (
    from_jsonable,
    load_program_file,
    parse,
    print_program,
    save_program_file,
    to_jsonable,
)
from .render import (
    DEFAULT_FPS,
    FrameSet,
    frame_count_for,
    render_sequence,
    write_frameset,
)
from .svg import entity_bbox, frame_svg, scene_svg

__all__ = [
    "Action",
    "ActionDiff",
    "Canvas",
    "DEFAULT_FPS",
    "Entity",
    "EntityState",
    "FrameSet",
    "GRAMMAR_DIGEST",
    "GRAMMAR_TEXT",
    "Initial",
    "MotionProgram",
    "SceneState",
    "Style",
    "bump_version",
    "diff",
    "diff_jsonable",
    "entity_bbox",
    "evaluate_at",
    "frame_count_for",
    "frame_svg",
    "from_jsonable",
    "load_program_file",
    "parse",
    "print_program",
    "render_sequence",
    "save_program_file",
    "scene_svg",
    "to_jsonable",
    "validate_program",
    "write_frameset",
]
