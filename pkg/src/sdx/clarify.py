"""Clarification protocol: cue levels, intent memory, generation sessions.

Ambiguities reported by the model are classified into four cue levels of
increasing weight (quick confirm, multiple choice, fill value, text or
upload). Answered cues are remembered in a per-project disambiguation
memory keyed by sketch-region fingerprint, so an unchanged sketch never
asks the same question twice; the stored answer is injected into the
regeneration prompt instead.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional

from .errors import AnswerTypeMismatch, InvalidTransition, UnknownCue
from .gateway.types import AmbiguityReportItem, ResolutionNote, ambiguity_jsonable
from .geometry import fmt_num
from .motion.model import MotionProgram
from .storyboard import CompositeImage, Storyboard, fingerprint_region, region_in_frame

CUE_LEVELS = ("quick_confirm", "multiple_choice", "fill_value", "text_or_upload")

# Ambiguity kind -> cue level, lowest to highest ambiguity. Total by
# construction; classify() rejects anything outside the four kinds.
KIND_TO_LEVEL = {
    "uncertain_stroke": "quick_confirm",
    "multi_interpretation": "multiple_choice",
    "missing_parameter": "fill_value",
    "abstract_symbol": "text_or_upload",
}

SESSION_STATES = ("Drafting", "Generating", "NeedsClarification", "Ready", "Failed")

# The only legal session transitions.
ALLOWED_TRANSITIONS = {
    ("Drafting", "Generating"),
    ("Generating", "NeedsClarification"),
    ("Generating", "Ready"),
    ("Generating", "Failed"),
    ("NeedsClarification", "Generating"),
}


def classify(item: AmbiguityReportItem) -> str:
    """Cue level for an ambiguity kind (total over the four kinds)."""
    try:
        return KIND_TO_LEVEL[item.kind]
    except KeyError:
        raise ValueError(f"unknown ambiguity kind: {item.kind}")


def normalize_question(question: str) -> str:
    text = re.sub(r"\s+", " ", question.strip().lower())
    return text.rstrip(".?! ")


@dataclass(frozen=True)
class Cue:
    id: str
    level: str
    question: str
    memory_key: str
    frame_index: int
    payload: dict[str, Any]
    source: AmbiguityReportItem


@dataclass(frozen=True)
class CueResolution:
    cue_id: str
    answer: dict[str, Any]


@dataclass
class MemoryEntry:
    key: str
    cue_id: str
    answer: dict[str, Any]
    text: str
    created_at: float
    hit_count: int = 1


def memory_key_for(item: AmbiguityReportItem, storyboard: Storyboard,
                   composite: CompositeImage) -> str:
    """Digest over (region fingerprint, kind, normalized question).

    Stable under stroke reordering and sub-cell jitter via the region
    fingerprint; distinct questions about one region stay distinct.
    """
    index = item.frame_index if 0 <= item.frame_index < len(storyboard.frames) else 0
    frame = storyboard.frames[index]
    region = region_in_frame(composite, index, item.region, storyboard.canvas_size)
    fp = fingerprint_region(frame, region)
    payload = json.dumps(
        [fp.digest, item.kind, normalize_question(item.question)],
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_cue(item: AmbiguityReportItem, storyboard: Storyboard,
              composite: CompositeImage) -> Cue:
    level = classify(item)
    key = memory_key_for(item, storyboard, composite)
    payload: dict[str, Any] = {}
    if level == "quick_confirm":
        payload["defaultGuess"] = item.default_guess
    elif level == "multiple_choice":
        payload["options"] = [
            {"label": o.label, "patchDescription": o.patch_description}
            for o in item.options
        ]
    elif level == "fill_value":
        p = item.parameter
        parameter = {"name": p.name, "unit": p.unit}
        for bound in ("min", "max", "default"):
            value = getattr(p, bound)
            if value is not None:
                parameter[bound] = value
        payload["parameter"] = parameter
    else:
        payload["assetHint"] = item.asset_hint
        payload["allowText"] = True
    return Cue(
        id=item.id or f"cue-{key[:12]}",
        level=level,
        question=item.question,
        memory_key=key,
        frame_index=item.frame_index,
        payload=payload,
        source=item,
    )


def cue_jsonable(cue: Cue) -> dict[str, Any]:
    return {
        "id": cue.id,
        "level": cue.level,
        "question": cue.question,
        "memoryKey": cue.memory_key,
        "frameIndex": cue.frame_index,
        "payload": cue.payload,
        "source": ambiguity_jsonable(cue.source),
    }


def cue_from_jsonable(raw: dict[str, Any]) -> Cue:
    from .gateway.types import ambiguity_from_jsonable

    return Cue(
        id=raw["id"],
        level=raw["level"],
        question=raw["question"],
        memory_key=raw["memoryKey"],
        frame_index=int(raw.get("frameIndex", 0)),
        payload=raw.get("payload", {}),
        source=ambiguity_from_jsonable(raw["source"], "/source"),
    )


def check_answer(cue: Cue, answer: dict[str, Any]) -> None:
    """Raise AnswerTypeMismatch unless the answer variant matches the level."""
    if not isinstance(answer, dict):
        raise AnswerTypeMismatch("answer must be an object")
    if cue.level == "quick_confirm":
        if not isinstance(answer.get("confirmed"), bool):
            raise AnswerTypeMismatch("quick_confirm needs {'confirmed': bool}")
    elif cue.level == "multiple_choice":
        index = answer.get("chosenOptionIndex")
        options = cue.payload.get("options", [])
        if not isinstance(index, int) or isinstance(index, bool):
            raise AnswerTypeMismatch("multiple_choice needs {'chosenOptionIndex': int}")
        if not (0 <= index < len(options)):
            raise AnswerTypeMismatch(f"option index {index} out of range 0..{len(options) - 1}")
    elif cue.level == "fill_value":
        value = answer.get("value")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise AnswerTypeMismatch("fill_value needs {'value': number}")
    elif cue.level == "text_or_upload":
        has_text = isinstance(answer.get("text"), str) and answer["text"]
        has_asset = isinstance(answer.get("assetRef"), str) and answer["assetRef"]
        if not (has_text or has_asset):
            raise AnswerTypeMismatch("text_or_upload needs text or assetRef")
    else:  # pragma: no cover - levels are closed
        raise AnswerTypeMismatch(f"unknown cue level: {cue.level}")


def render_resolution_text(cue: Cue, answer: dict[str, Any]) -> str:
    """The line injected verbatim into regeneration prompts."""
    if cue.level == "quick_confirm":
        return f"{cue.question} -> {'yes' if answer['confirmed'] else 'no'}"
    if cue.level == "multiple_choice":
        label = cue.payload["options"][answer["chosenOptionIndex"]]["label"]
        return f"{cue.question} -> {label}"
    if cue.level == "fill_value":
        parameter = cue.payload["parameter"]
        unit = answer.get("unit") or parameter.get("unit", "")
        value = fmt_num(float(answer["value"]))
        return f"{parameter['name']} = {value} {unit}".rstrip()
    if answer.get("assetRef"):
        return f"{cue.question} -> use asset {answer['assetRef']}"
    return f"{cue.question} -> {answer['text']}"


# --- intent disambiguation memory ------------------------------------------


class DisambiguationMemory:
    """JSON-lines backed store of answered cues, one entry per key.

    Reads are lock-free over an immutable snapshot pattern; writes are
    serialized and rewrite the file atomically.
    """

    def __init__(self, path: Optional[str] = None):
        self.path = str(path) if path else None
        self.entries: dict[str, MemoryEntry] = {}
        self._lock = threading.Lock()
        if self.path and os.path.exists(self.path):
            self._load()

    def _load(self) -> None:
        with open(self.path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                entry = MemoryEntry(
                    key=raw["key"], cue_id=raw.get("cueId", ""),
                    answer=raw.get("answer", {}), text=raw.get("text", ""),
                    created_at=float(raw.get("createdAt", 0.0)),
                    hit_count=int(raw.get("hitCount", 1)),
                )
                self.entries[entry.key] = entry

    def _flush(self) -> None:
        if not self.path:
            return
        lines = []
        for key in sorted(self.entries):
            e = self.entries[key]
            lines.append(json.dumps({
                "key": e.key, "cueId": e.cue_id, "answer": e.answer,
                "text": e.text, "createdAt": e.created_at, "hitCount": e.hit_count,
            }, ensure_ascii=False))
        tmp = self.path + ".tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + ("\n" if lines else ""))
        os.replace(tmp, self.path)

    def lookup(self, key: str) -> Optional[MemoryEntry]:
        return self.entries.get(key)

    def upsert(self, key: str, cue_id: str, answer: dict[str, Any], text: str) -> MemoryEntry:
        with self._lock:
            existing = self.entries.get(key)
            if existing is not None:
                existing.answer = answer
                existing.text = text
                existing.cue_id = cue_id
                existing.hit_count += 1
                entry = existing
            else:
                entry = MemoryEntry(key=key, cue_id=cue_id, answer=answer,
                                    text=text, created_at=time.time())
                self.entries[key] = entry
            self._flush()
            return entry

    def record_hit(self, key: str) -> None:
        with self._lock:
            entry = self.entries.get(key)
            if entry is not None:
                entry.hit_count += 1
                self._flush()


# --- generation session ------------------------------------------------------


@dataclass
class GenerationSession:
    """Single-writer state machine driving generate -> clarify -> regenerate.

    Transitions are confined to ALLOWED_TRANSITIONS; program versions are
    append-only.
    """

    id: str
    storyboard_version: str = ""
    state: str = "Drafting"
    pending: dict[str, Cue] = field(default_factory=dict)
    resolved: list[CueResolution] = field(default_factory=list)
    resolution_notes: list[ResolutionNote] = field(default_factory=list)
    skipped_keys: set[str] = field(default_factory=set)
    program_versions: list[MotionProgram] = field(default_factory=list)
    failure: str = ""

    def _transition(self, target: str) -> None:
        if (self.state, target) not in ALLOWED_TRANSITIONS:
            raise InvalidTransition(f"cannot move {self.state} -> {target}")
        self.state = target

    # -- operations --

    def begin_generation(self) -> None:
        self._transition("Generating")

    def fail(self, reason: str) -> None:
        self._transition("Failed")
        self.failure = reason

    def complete(self, program: MotionProgram) -> MotionProgram:
        """Generating -> Ready, appending the program as the next version."""
        if self.state != "Generating":
            raise InvalidTransition(f"cannot complete from {self.state}")
        versioned = program if program.version == len(self.program_versions) + 1 else (
            _with_version(program, len(self.program_versions) + 1))
        self._transition("Ready")
        self.program_versions.append(versioned)
        return versioned

    def append_version(self, program: MotionProgram) -> MotionProgram:
        """Append a refinement result while staying Ready."""
        if self.state != "Ready":
            raise InvalidTransition(f"cannot append a version from {self.state}")
        versioned = _with_version(program, len(self.program_versions) + 1)
        self.program_versions.append(versioned)
        return versioned

    def surface_cues(self, report: Iterable[AmbiguityReportItem],
                     storyboard: Storyboard, composite: CompositeImage,
                     memory: DisambiguationMemory) -> list[Cue]:
        """Turn a fresh ambiguity report into pending cues.

        Memory hits are auto-applied (stored answer injected, hit counted,
        no cue raised); keys skipped earlier in this session stay skipped.
        Moves to NeedsClarification when anything is left to ask.
        """
        if self.state != "Generating":
            raise InvalidTransition(f"cannot surface cues from {self.state}")
        surfaced: list[Cue] = []
        known_notes = {note.cue_id for note in self.resolution_notes}
        for item in report:
            cue = build_cue(item, storyboard, composite)
            entry = memory.lookup(cue.memory_key)
            if entry is not None:
                if cue.id not in known_notes:
                    memory.record_hit(cue.memory_key)
                    self.resolution_notes.append(ResolutionNote(cue_id=cue.id, text=entry.text))
                    known_notes.add(cue.id)
                continue
            if cue.memory_key in self.skipped_keys:
                continue
            surfaced.append(cue)
            self.pending[cue.id] = cue
        if surfaced or self.pending:
            self._transition("NeedsClarification")
        return surfaced

    def resolve(self, resolution: CueResolution,
                memory: DisambiguationMemory) -> None:
        """Answer one pending cue; re-enter Generating once none are left."""
        cue = self.pending.get(resolution.cue_id)
        if cue is None:
            raise UnknownCue(f"no pending cue with id {resolution.cue_id}")
        check_answer(cue, resolution.answer)
        text = render_resolution_text(cue, resolution.answer)
        del self.pending[resolution.cue_id]
        self.resolved.append(resolution)
        self.resolution_notes.append(ResolutionNote(cue_id=cue.id, text=text))
        memory.upsert(cue.memory_key, cue.id, resolution.answer, text)
        if not self.pending:
            self._transition("Generating")

    def skip(self, cue_id: str) -> None:
        """Decline one pending cue: the model's primary guess stands and
        nothing is memorized."""
        cue = self.pending.get(cue_id)
        if cue is None:
            raise UnknownCue(f"no pending cue with id {cue_id}")
        del self.pending[cue_id]
        self.skipped_keys.add(cue.memory_key)
        if not self.pending:
            self._transition("Generating")

    def notes(self) -> tuple[ResolutionNote, ...]:
        return tuple(self.resolution_notes)


def _with_version(program: MotionProgram, version: int) -> MotionProgram:
    from dataclasses import replace

    return replace(program, version=version)
