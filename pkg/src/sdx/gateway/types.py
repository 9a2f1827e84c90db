"""Request/response types for the interpretation gateway."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Any, Optional

from ..errors import ValidationError
from ..geometry import Box
from ..jsoncanon import dumps_canonical
from ..storyboard import CompositeImage

AMBIGUITY_KINDS = (
    "uncertain_stroke",
    "multi_interpretation",
    "missing_parameter",
    "abstract_symbol",
)


@dataclass(frozen=True)
class AmbiguityOption:
    label: str
    patch_description: str = ""


@dataclass(frozen=True)
class AmbiguityParameter:
    name: str
    unit: str = ""
    min: Optional[float] = None
    max: Optional[float] = None
    default: Optional[float] = None


@dataclass(frozen=True)
class AmbiguityReportItem:
    """One ambiguity the model flagged before rendering."""

    id: str
    kind: str
    question: str
    frame_index: int = 0
    region: Optional[Box] = None  # composite coordinates
    options: tuple[AmbiguityOption, ...] = ()
    parameter: Optional[AmbiguityParameter] = None
    asset_hint: str = ""
    default_guess: bool = True


@dataclass(frozen=True)
class ResolutionNote:
    """A user answer rendered to text, included verbatim in regeneration prompts."""

    cue_id: str
    text: str


@dataclass(frozen=True)
class RefinementContext:
    """Everything the model needs to apply a localized edit."""

    base_program_text: str
    anchors: tuple[tuple[float, str], ...]  # (timestamp, frame svg)
    target_index: int
    window: tuple[float, float]
    overlay_svg: str = ""  # target frame with overlay strokes composited
    text: str = ""


@dataclass(frozen=True)
class GenerationRequest:
    composite: CompositeImage
    scripts: tuple[str, ...]
    grammar_digest: str
    resolutions: tuple[ResolutionNote, ...] = ()
    refinement: Optional[RefinementContext] = None
    provider_id: str = "fixture"


@dataclass(frozen=True)
class PromptBundle:
    system_text: str
    user_text: str
    images: tuple[tuple[str, str, bytes], ...] = ()  # (name, media type, bytes)


@dataclass(frozen=True)
class ModelResponse:
    raw_text: str
    program: Any  # MotionProgram
    ambiguities: tuple[AmbiguityReportItem, ...]
    usage: dict = field(default_factory=dict)


def bundle_digest(bundle: PromptBundle) -> str:
    """Content address of a prompt bundle (image payloads by hash)."""
    payload = {
        "system": bundle.system_text,
        "user": bundle.user_text,
        "images": [
            {"name": name, "mediaType": media, "sha256": hashlib.sha256(data).hexdigest()}
            for name, media, data in bundle.images
        ],
    }
    return hashlib.sha256(dumps_canonical(payload).encode("utf-8")).hexdigest()


def bundle_jsonable(bundle: PromptBundle) -> dict:
    return {
        "system": bundle.system_text,
        "user": bundle.user_text,
        "images": [
            {"name": name, "mediaType": media, "sha256": hashlib.sha256(data).hexdigest()}
            for name, media, data in bundle.images
        ],
    }


def ambiguity_from_jsonable(raw: Any, where: str) -> AmbiguityReportItem:
    if not isinstance(raw, dict):
        raise ValidationError("ambiguity item must be an object", where)
    kind = raw.get("kind")
    if kind not in AMBIGUITY_KINDS:
        raise ValidationError(f"unknown ambiguity kind: {kind}", where + "/kind")
    question = raw.get("question")
    if not isinstance(question, str) or not question:
        raise ValidationError("ambiguity needs a question", where + "/question")

    options = tuple(
        AmbiguityOption(label=str(o.get("label", "")),
                        patch_description=str(o.get("patchDescription", "")))
        for o in raw.get("options", [])
    )
    parameter = None
    if isinstance(raw.get("parameter"), dict):
        p = raw["parameter"]
        parameter = AmbiguityParameter(
            name=str(p.get("name", "")), unit=str(p.get("unit", "")),
            min=p.get("min"), max=p.get("max"), default=p.get("default"),
        )

    if kind == "multi_interpretation" and len(options) < 2:
        raise ValidationError("multi_interpretation needs >= 2 options", where + "/options")
    if kind == "missing_parameter" and parameter is None:
        raise ValidationError("missing_parameter needs parameter", where + "/parameter")

    region = raw.get("region")
    box: Optional[Box] = None
    if region is not None:
        if not isinstance(region, (list, tuple)) or len(region) != 4:
            raise ValidationError("region must be [x0,y0,x1,y1]", where + "/region")
        box = tuple(float(v) for v in region)  # type: ignore[assignment]

    return AmbiguityReportItem(
        id=str(raw.get("id", "")),
        kind=kind,
        question=question,
        frame_index=int(raw.get("frameIndex", 0)),
        region=box,
        options=options,
        parameter=parameter,
        asset_hint=str(raw.get("assetHint", "")),
        default_guess=bool(raw.get("defaultGuess", True)),
    )


def ambiguity_jsonable(item: AmbiguityReportItem) -> dict:
    out: dict[str, Any] = {
        "id": item.id,
        "kind": item.kind,
        "question": item.question,
        "frameIndex": item.frame_index,
    }
    if item.region is not None:
        out["region"] = list(item.region)
    if item.options:
        out["options"] = [
            {"label": o.label, "patchDescription": o.patch_description}
            for o in item.options
        ]
    if item.parameter is not None:
        p = {"name": item.parameter.name, "unit": item.parameter.unit}
        for key in ("min", "max", "default"):
            value = getattr(item.parameter, key)
            if value is not None:
                p[key] = value
        out["parameter"] = p
    if item.asset_hint:
        out["assetHint"] = item.asset_hint
    if not item.default_guess:
        out["defaultGuess"] = False
    return out
