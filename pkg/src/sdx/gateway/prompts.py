"""Prompt assembly for storyboard interpretation and refinement.

build_prompt is deterministic: equal requests produce byte-equal bundles,
and any change to the composite, scripts, resolutions or refinement
context changes the bundle digest.
"""

from __future__ import annotations

from ..errors import ValidationError
from ..geometry import fmt_num
from ..motion.grammar import GRAMMAR_DIGEST, GRAMMAR_TEXT
from .exemplars import EXEMPLARS
from .types import GenerationRequest, PromptBundle

SYSTEM_TEXT = """\
You translate hand-drawn storyboard sketches into motion programs.

You receive one composite image laying out every storyboard frame in a
grid, each cell labeled "Frame k" with the frame's script note beneath
it. Read the frames in order as moments of one continuous animation.
Arrows, dashed outlines, numbers and other informal marks usually convey
motion, future states or sequencing rather than visible artwork.

Reply with exactly two fenced JSON blocks and nothing else:

1. a complete motion program following the grammar below;
2. a JSON array of ambiguity reports (use [] when the sketches are clear).

Ambiguity reports flag places where the sketches leave intent open. Each
item is an object: {"id", "frameIndex", "region", "kind", "question"} plus
kind-specific fields:
  "uncertain_stroke"     - your primary guess is encoded in the program;
                           add "defaultGuess": true|false.
  "multi_interpretation" - add "options": [{"label", "patchDescription"}, ...]
                           (at least two).
  "missing_parameter"    - add "parameter": {"name", "unit", "min", "max",
                           "default"}.
  "abstract_symbol"      - add "assetHint" describing a useful asset.
Request clarifications only when necessary, and only about aspects that
critically affect the animation; encode your best guess in the program
either way.
"""

_REFINEMENT_INSTRUCTIONS = """\
This is a refinement pass. Revise the base program so the requested change
happens, and return the complete revised program. Change only behavior
inside the given time window; everything outside it must play back
exactly as before.
"""


def build_prompt(req: GenerationRequest) -> PromptBundle:
    if req.grammar_digest != GRAMMAR_DIGEST:
        raise ValidationError("request grammar digest does not match bundled grammar",
                              "/grammarDigest")

    parts: list[str] = []
    parts.append("## Motion program grammar\n\n" + GRAMMAR_TEXT)
    parts.append("## Examples\n")
    for i, (description, program_text) in enumerate(EXEMPLARS, start=1):
        parts.append(f"### Example {i}\nSketch: {description}\n\n"
                     f"```json\n{program_text}\n```\n\n```json\n[]\n```\n")

    parts.append("## Storyboard\n")
    parts.append(f"The attached composite image contains {len(req.scripts)} frames.")
    for i, script in enumerate(req.scripts):
        note = script if script else "(no script)"
        parts.append(f"Frame {i + 1} script: {note}")

    if req.resolutions:
        parts.append("\n## Clarifications already answered\n")
        parts.append("Honor each of these user answers exactly:")
        for note in req.resolutions:
            parts.append(f"- [{note.cue_id}] {note.text}")

    if req.refinement is not None:
        ctx = req.refinement
        target_ts = ctx.anchors[ctx.target_index][0]
        parts.append("\n## Refinement request\n")
        parts.append(_REFINEMENT_INSTRUCTIONS)
        parts.append(f"Base program (version to revise):\n```json\n{ctx.base_program_text}\n```")
        parts.append(f"The animation has {len(ctx.anchors)} keyframes at: "
                     + ", ".join(fmt_num(ts) + " s" for ts, _ in ctx.anchors) + ".")
        parts.append(f"Target keyframe: {fmt_num(target_ts)} s (attached; keyframe "
                     f"{ctx.target_index + 1} of {len(ctx.anchors)}).")
        parts.append(f"Time window for changes: {fmt_num(ctx.window[0])} s to "
                     f"{fmt_num(ctx.window[1])} s.")
        if ctx.overlay_svg:
            parts.append("The user sketched on the target frame; the attached overlay "
                         "image shows their strokes on top of it.")
        if ctx.text:
            parts.append(f"The user wrote: {ctx.text}")

    parts.append("\nReturn the program block first, then the ambiguity block.")
    user_text = "\n".join(parts)

    images: list[tuple[str, str, bytes]] = [
        ("storyboard.svg", "image/svg+xml", req.composite.svg.encode("utf-8")),
    ]
    if req.refinement is not None and req.refinement.overlay_svg:
        images.append(("refinement-overlay.svg", "image/svg+xml",
                       req.refinement.overlay_svg.encode("utf-8")))

    return PromptBundle(system_text=SYSTEM_TEXT, user_text=user_text, images=tuple(images))
