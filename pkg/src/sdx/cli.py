"""Headless command line: generate, render, keyframes, refine, diff, serve.

Exit codes: 1 validation problem, 2 provider failure, 3 clarification
needed (pending cues are printed as JSON), 4 locality rejection.
"""

from __future__ import annotations

import json
import os
import sys
from typing import Any, Optional

import click

from .clarify import CueResolution, DisambiguationMemory, GenerationSession, cue_jsonable
from .errors import (
    EmptyRefinement,
    FixtureMiss,
    LocalityViolation,
    MalformedResponse,
    ProgramSyntaxError,
    ProviderUnreachable,
    SdxError,
    ValidationError,
)
from .gateway.providers import (
    ENV_FIXTURES_DIR,
    ENV_PROVIDER,
    Provider,
    provider_from_env,
)
from .gateway.types import GenerationRequest
from .motion.diffing import diff, diff_jsonable
from .motion.grammar import GRAMMAR_DIGEST
from .motion.parser import load_program_file, print_program
from .motion.render import DEFAULT_FPS, render_sequence, write_frameset
from .refine import (
    RefinementRequest,
    extract_keyframes,
    nearest_anchor,
    refine_program,
)
from .service.runner import drive_generation
from .service.store import SessionRecord
from .storyboard import SketchFrame, Storyboard, Stroke, composite_storyboard, load_storyboard

EXIT_VALIDATION = 1
EXIT_PROVIDER = 2
EXIT_CLARIFICATION = 3
EXIT_LOCALITY = 4


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _provider(provider_id: Optional[str], fixtures_dir: Optional[str]) -> Provider:
    env = dict(os.environ)
    if provider_id:
        env[ENV_PROVIDER] = provider_id
    if fixtures_dir:
        env[ENV_FIXTURES_DIR] = fixtures_dir
    return provider_from_env(env)


def _load_program(path: str):
    try:
        return load_program_file(path)
    except FileNotFoundError:
        _fail(EXIT_VALIDATION, f"no such file: {path}")
    except (ProgramSyntaxError, ValidationError) as exc:
        _fail(EXIT_VALIDATION, str(exc))


def refinement_template() -> GenerationRequest:
    """Deterministic request scaffold for storyboard-less refinement runs."""
    placeholder = Storyboard(id="refinement", frames=(SketchFrame(index=0),))
    return GenerationRequest(
        composite=composite_storyboard(placeholder),
        scripts=("",),
        grammar_digest=GRAMMAR_DIGEST,
    )


@click.group()
def main() -> None:
    """Sketch-to-animation toolkit."""


@main.command()
@click.option("--storyboard", "storyboard_path", required=True,
              type=click.Path(exists=False), help="Input .sdproj file.")
@click.option("--provider", "provider_id", default=None,
              help="Provider id (fixture | openai-compatible).")
@click.option("--fixtures-dir", default=None, type=click.Path(),
              help="Fixture directory (overrides SDX_FIXTURES_DIR).")
@click.option("--answers", "answers_path", default=None, type=click.Path(),
              help="JSON file mapping cue memoryKey -> answer object.")
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Where to write the generated .ms.json program.")
def generate(storyboard_path: str, provider_id: Optional[str],
             fixtures_dir: Optional[str], answers_path: Optional[str],
             out_path: str) -> None:
    """Interpret a storyboard into a motion program."""
    try:
        with open(storyboard_path, "r", encoding="utf-8") as fh:
            storyboard = load_storyboard(fh.read())
    except FileNotFoundError:
        _fail(EXIT_VALIDATION, f"no such file: {storyboard_path}")
    except ValidationError as exc:
        _fail(EXIT_VALIDATION, f"invalid storyboard: {exc}")

    answers: dict[str, Any] = {}
    if answers_path:
        try:
            with open(answers_path, "r", encoding="utf-8") as fh:
                answers = json.load(fh)
        except FileNotFoundError:
            _fail(EXIT_VALIDATION, f"no such file: {answers_path}")
        except json.JSONDecodeError as exc:
            _fail(EXIT_VALIDATION, f"answers file is not JSON: {exc}")

    try:
        provider = _provider(provider_id, fixtures_dir)
    except ValidationError as exc:
        _fail(EXIT_PROVIDER, str(exc))

    session = GenerationSession(id="cli", storyboard_version="cli")
    record = SessionRecord(session=session, project_id="cli", storyboard=storyboard)
    memory = DisambiguationMemory()  # answers stand in for persistent memory
    session.begin_generation()

    try:
        while True:
            drive_generation(record, memory, provider)
            if session.state != "NeedsClarification":
                break
            unanswered = []
            for cue in list(session.pending.values()):
                answer = answers.get(cue.memory_key)
                if answer is None:
                    unanswered.append(cue)
                else:
                    session.resolve(CueResolution(cue_id=cue.id, answer=answer), memory)
            if unanswered:
                click.echo(json.dumps({
                    "status": "needs_clarification",
                    "cues": [cue_jsonable(c) for c in unanswered],
                }, indent=2))
                sys.exit(EXIT_CLARIFICATION)
    except (ProviderUnreachable, FixtureMiss, MalformedResponse) as exc:
        _fail(EXIT_PROVIDER, str(exc))
    except SdxError as exc:
        _fail(EXIT_VALIDATION, str(exc))

    if session.state != "Ready":
        _fail(EXIT_VALIDATION, f"generation ended in state {session.state}: {session.failure}")
    program = session.program_versions[-1]
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(print_program(program))
    click.echo(f"wrote {out_path} (version {program.version})", err=True)


@main.command()
@click.argument("program_path", type=click.Path())
@click.option("--fps", default=DEFAULT_FPS, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for frame_%05d.svg files plus manifest.json.")
@click.option("--encode", "encode_template", default=None,
              help="External encoder command template with {frames}, {pattern}, "
                   "{fps} placeholders (defaults to SDX_ENCODER_TEMPLATE).")
def render(program_path: str, fps: int, out_dir: str,
           encode_template: Optional[str]) -> None:
    """Render a program into an SVG frame sequence."""
    program = _load_program(program_path)
    try:
        frameset = render_sequence(program, fps)
    except SdxError as exc:
        _fail(EXIT_VALIDATION, str(exc))
    manifest = write_frameset(frameset, out_dir)
    click.echo(f"wrote {manifest['frameCount']} frames to {out_dir}", err=True)
    template = encode_template or os.environ.get("SDX_ENCODER_TEMPLATE")
    if template:
        from .motion.render import stitch_video

        try:
            stitch_video(out_dir, fps, template)
        except Exception as exc:
            _fail(EXIT_VALIDATION, f"encoder command failed: {exc}")
        click.echo("encoder command finished", err=True)


@main.command()
@click.argument("program_path", type=click.Path())
@click.option("--fps", default=DEFAULT_FPS, show_default=True, type=int)
def keyframes(program_path: str, fps: int) -> None:
    """List keyframe anchors as JSON on stdout."""
    program = _load_program(program_path)
    anchors = extract_keyframes(program, fps=fps, render_frames=False)
    click.echo(json.dumps([
        {
            "timestamp": a.timestamp,
            "reasons": list(a.reasons),
            "sourceActionIds": list(a.source_action_ids),
        }
        for a in anchors
    ], indent=2))


@main.command()
@click.argument("program_path", type=click.Path())
@click.option("--at", "at_time", required=True, type=float,
              help="Anchor timestamp in seconds (snapped to the nearest keyframe).")
@click.option("--overlay", "overlay_path", default=None, type=click.Path(),
              help="JSON file with overlay strokes (Stroke schema).")
@click.option("--text", default="", help="Textual refinement cue.")
@click.option("--window", "half_width", default=2.0, show_default=True, type=float,
              help="Half-width of the locality window around the anchor.")
@click.option("--strict/--no-strict", default=False,
              help="Reject the revision if it changes anything outside the window.")
@click.option("--provider", "provider_id", default=None)
@click.option("--fixtures-dir", default=None, type=click.Path())
@click.option("--fps", default=DEFAULT_FPS, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path(),
              help="Where to write the revised program.")
def refine(program_path: str, at_time: float, overlay_path: Optional[str],
           text: str, half_width: float, strict: bool,
           provider_id: Optional[str], fixtures_dir: Optional[str],
           fps: int, out_path: str) -> None:
    """Apply a localized edit to a program via the model."""
    base = _load_program(program_path)
    strokes: list[Stroke] = []
    if overlay_path:
        try:
            with open(overlay_path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            _fail(EXIT_VALIDATION, f"no such file: {overlay_path}")
        except json.JSONDecodeError as exc:
            _fail(EXIT_VALIDATION, f"overlay file is not JSON: {exc}")
        items = raw.get("strokes", raw) if isinstance(raw, dict) else raw
        for i, s in enumerate(items):
            pts = tuple((float(x), float(y)) for x, y in s.get("points", []))
            strokes.append(Stroke(points=pts,
                                  color=tuple(float(c) for c in s.get("color", (1, 0, 0, 1))),
                                  width=float(s.get("width", 4.0)),
                                  seq=int(s.get("seq", i))))

    anchors = extract_keyframes(base, fps=fps, render_frames=False)
    anchor = nearest_anchor(anchors, at_time)
    window = (max(0.0, anchor.timestamp - half_width), anchor.timestamp + half_width)
    request = RefinementRequest(
        session_id="cli", base_version=base.version or 1, anchor=anchor,
        window=window, overlay_strokes=tuple(strokes), text=text, strict=strict,
    )
    try:
        provider = _provider(provider_id, fixtures_dir)
        revised, report = refine_program(base, request, refinement_template(),
                                         provider, fps=fps)
    except LocalityViolation as exc:
        click.echo(json.dumps(exc.report.jsonable(), indent=2))
        sys.exit(EXIT_LOCALITY)
    except (ProviderUnreachable, FixtureMiss, MalformedResponse) as exc:
        _fail(EXIT_PROVIDER, str(exc))
    except (EmptyRefinement, ValidationError) as exc:
        _fail(EXIT_VALIDATION, str(exc))

    from dataclasses import replace

    revised = replace(revised, version=base.version + 1)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(print_program(revised))
    click.echo(json.dumps(report.jsonable(), indent=2))
    click.echo(f"wrote {out_path} (version {revised.version})", err=True)


@main.command(name="diff")
@click.argument("path_a", type=click.Path())
@click.argument("path_b", type=click.Path())
def diff_command(path_a: str, path_b: str) -> None:
    """Action-level diff of two programs, JSON on stdout."""
    a = _load_program(path_a)
    b = _load_program(path_b)
    click.echo(json.dumps(diff_jsonable(diff(a, b)), indent=2))


@main.command()
@click.option("--port", default=None, type=int, help="Overrides SDX_PORT.")
@click.option("--data-dir", default=None, type=click.Path(), help="Overrides SDX_DATA_DIR.")
def serve(port: Optional[int], data_dir: Optional[str]) -> None:
    """Run the HTTP session service."""
    import uvicorn

    from .service.app import ENV_DATA_DIR, ENV_PORT, make_app

    resolved_port = port if port is not None else int(os.environ.get(ENV_PORT, "8600"))
    app = make_app(data_dir or os.environ.get(ENV_DATA_DIR))
    uvicorn.run(app, host="127.0.0.1", port=resolved_port)


if __name__ == "__main__":
    main()
