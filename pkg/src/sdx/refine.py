"""Keyframe-anchored refinement with locality checking.

A refinement points at one extracted keyframe, carries overlay strokes
and/or a short text cue, and declares the time window its change may
affect. After the model returns a revised program, the locality check
diffs the two programs and flags any changed action whose lifetime lies
outside the window and whose entity was not pointed at by the overlay.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .errors import EmptyRefinement, LocalityViolation
from .gateway.invoke import invoke
from .gateway.prompts import build_prompt
from .gateway.providers import Provider
from .gateway.types import GenerationRequest, RefinementContext
from .geometry import Box, bbox_of_points, boxes_intersect
from .motion.diffing import diff, diff_jsonable
from .motion.engine import evaluate_at
from .motion.model import ActionDiff, MotionProgram
from .motion.parser import print_program
from .motion.render import DEFAULT_FPS
from .motion.svg import AssetResolver, entity_bbox, frame_svg
from .storyboard import Stroke, _stroke_path

MAX_ANCHORS = 12
DEFAULT_WINDOW_HALF_WIDTH = 2.0

ANCHOR_REASONS = ("program_start", "action_start", "action_end", "program_end")


@dataclass(frozen=True)
class KeyframeAnchor:
    timestamp: float
    reasons: tuple[str, ...]
    source_action_ids: tuple[str, ...]
    frame_svg: str = ""


@dataclass(frozen=True)
class RefinementRequest:
    session_id: str
    base_version: int
    anchor: KeyframeAnchor
    window: tuple[float, float]
    overlay_strokes: tuple[Stroke, ...] = ()
    text: str = ""
    strict: bool = False


@dataclass(frozen=True)
class LocalityReport:
    diff: ActionDiff
    offenders: frozenset[str]
    verdict: str  # pass | warn | reject

    def jsonable(self) -> dict:
        return {
            "verdict": self.verdict,
            "offenders": sorted(self.offenders),
            "diff": diff_jsonable(self.diff),
        }


def window_around(timestamp: float, half_width: float = DEFAULT_WINDOW_HALF_WIDTH) -> tuple[float, float]:
    return (max(0.0, timestamp - half_width), timestamp + half_width)


def extract_keyframes(program: MotionProgram, fps: int = DEFAULT_FPS,
                      assets: Optional[AssetResolver] = None,
                      render_frames: bool = True) -> list[KeyframeAnchor]:
    """Salient timestamps of a program: start, every action boundary, end.

    Timestamps closer than one frame interval merge into the earliest of
    the cluster; at most MAX_ANCHORS survive, preferring the program
    endpoints and appear/disappear boundaries.
    """
    duration = program.total_duration()
    candidates: list[tuple[float, str, Optional[str]]] = [(0.0, "program_start", None)]
    for action in program.timeline:
        candidates.append((action.start, "action_start", action.id))
        candidates.append((action.effective_end, "action_end", action.id))
    candidates.append((duration, "program_end", None))
    candidates.sort(key=lambda c: c[0])

    min_gap = 1.0 / fps
    clusters: list[dict] = []
    for ts, reason, action_id in candidates:
        if clusters and ts - clusters[-1]["timestamp"] < min_gap:
            cluster = clusters[-1]
        else:
            cluster = {"timestamp": ts, "reasons": set(), "ids": set()}
            clusters.append(cluster)
        cluster["reasons"].add(reason)
        if action_id is not None:
            cluster["ids"].add(action_id)

    if len(clusters) > MAX_ANCHORS:
        show_stoppers = {a.id for a in program.timeline if a.kind in ("appear", "disappear")}

        def priority(cluster: dict) -> tuple:
            if "program_start" in cluster["reasons"]:
                rank = 0
            elif "program_end" in cluster["reasons"]:
                rank = 1
            elif cluster["ids"] & show_stoppers:
                rank = 2
            else:
                rank = 3
            return (rank, cluster["timestamp"])

        clusters = sorted(sorted(clusters, key=priority)[:MAX_ANCHORS],
                          key=lambda c: c["timestamp"])

    anchors = []
    for cluster in clusters:
        svg = frame_svg(program, cluster["timestamp"], assets) if render_frames else ""
        anchors.append(KeyframeAnchor(
            timestamp=cluster["timestamp"],
            reasons=tuple(sorted(cluster["reasons"])),
            source_action_ids=tuple(sorted(cluster["ids"])),
            frame_svg=svg,
        ))
    return anchors


def nearest_anchor(anchors: list[KeyframeAnchor], timestamp: float) -> KeyframeAnchor:
    return min(anchors, key=lambda a: (abs(a.timestamp - timestamp), a.timestamp))


def compose_overlay(frame: str, strokes: tuple[Stroke, ...]) -> str:
    """Draw overlay strokes on top of a rendered frame."""
    markup = "\n".join(
        _stroke_path(list(s.points), s.color, s.width)
        for s in sorted(strokes, key=lambda s: s.seq)
    )
    return frame.replace("</svg>", markup + "\n</svg>")


def build_refinement_context(base: MotionProgram, req: RefinementRequest,
                             fps: int = DEFAULT_FPS,
                             assets: Optional[AssetResolver] = None) -> RefinementContext:
    """Package everything the model needs for a localized edit."""
    if not req.overlay_strokes and not req.text:
        raise EmptyRefinement("refinement needs overlay strokes or text")
    if not (req.window[0] <= req.anchor.timestamp <= req.window[1]):
        raise EmptyRefinement(
            f"anchor {req.anchor.timestamp} outside window {req.window}")

    anchors = extract_keyframes(base, fps=fps, assets=assets)
    target = nearest_anchor(anchors, req.anchor.timestamp)
    target_index = anchors.index(target)
    overlay = ""
    if req.overlay_strokes:
        overlay = compose_overlay(target.frame_svg, req.overlay_strokes)
    return RefinementContext(
        base_program_text=print_program(base),
        anchors=tuple((a.timestamp, a.frame_svg) for a in anchors),
        target_index=target_index,
        window=req.window,
        overlay_svg=overlay,
        text=req.text,
    )


def _intervals_for(change) -> list[tuple[float, float]]:
    intervals = []
    for action in (change.before, change.after):
        if action is not None:
            intervals.append((action.start, action.effective_end))
    return intervals


def _overlay_entities(base: MotionProgram, revised: MotionProgram,
                      req: RefinementRequest) -> set[str]:
    """Entities whose rendered box at the anchor meets the overlay's box."""
    if not req.overlay_strokes:
        return set()
    points = [p for stroke in req.overlay_strokes for p in stroke.points]
    overlay_box: Box = bbox_of_points(points)
    exempt: set[str] = set()
    base_ids = {e.id for e in base.entities}
    for program in (base, revised):
        state = evaluate_at(program, req.anchor.timestamp)
        for entity in program.entities:
            if program is revised and entity.id in base_ids:
                continue
            box = entity_bbox(state.entities[entity.id], entity)
            if boxes_intersect(box, overlay_box):
                exempt.add(entity.id)
    return exempt


def validate_locality(base: MotionProgram, revised: MotionProgram,
                      req: RefinementRequest) -> LocalityReport:
    """Flag changed actions living entirely outside the refinement window.

    A changed action is exempt when every one of its before/after
    intervals intersects the window, or when its entity is one the
    overlay strokes point at.
    """
    d = diff(base, revised)
    exempt_entities = _overlay_entities(base, revised, req)
    t1, t2 = req.window
    offenders = set()
    all_changes = {**d.added, **d.removed, **d.modified}
    for action_id, change in all_changes.items():
        entity_id = (change.after or change.before).entity_id
        if entity_id in exempt_entities:
            continue
        intervals = _intervals_for(change)
        if all(start <= t2 and t1 <= end for start, end in intervals):
            continue
        offenders.add(action_id)
    if offenders:
        verdict = "reject" if req.strict else "warn"
    else:
        verdict = "pass"
    return LocalityReport(diff=d, offenders=frozenset(offenders), verdict=verdict)


def refine_program(base: MotionProgram, req: RefinementRequest,
                   request_template: GenerationRequest, provider: Provider,
                   fps: int = DEFAULT_FPS,
                   assets: Optional[AssetResolver] = None):
    """Run one refinement round-trip: prompt, revise, locality-check.

    Returns (revised_program, report); raises LocalityViolation on a
    strict reject. The caller decides how to version the result.
    """
    context = build_refinement_context(base, req, fps=fps, assets=assets)
    generation_request = replace(request_template, refinement=context)
    bundle = build_prompt(generation_request)
    response = invoke(bundle, provider)
    revised = response.program
    report = validate_locality(base, revised, req)
    if report.verdict == "reject":
        raise LocalityViolation(report)
    return revised, report


def frames_equal_outside_window(base_frames: list[str], revised_frames: list[str],
                                fps: int, window: tuple[float, float]) -> list[int]:
    """Indices of frames outside [t1 - 1/fps, t2 + 1/fps] that differ."""
    lo = window[0] - 1.0 / fps
    hi = window[1] + 1.0 / fps
    differing = []
    for i in range(max(len(base_frames), len(revised_frames))):
        t = i / fps
        if lo <= t <= hi:
            continue
        a = base_frames[i] if i < len(base_frames) else None
        b = revised_frames[i] if i < len(revised_frames) else None
        if a != b:
            differing.append(i)
    return differing
