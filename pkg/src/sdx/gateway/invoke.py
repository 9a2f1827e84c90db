"""Calling a provider and parsing its structured reply.

The model must answer with two fenced JSON blocks: the program, then an
array of ambiguity reports (a missing second block means "no
ambiguities"). If the program fails to parse or validate, exactly one
repair round-trip is attempted: the provider is re-prompted with the
error appended, after which a bad program is surfaced as
MalformedResponse.
"""

from __future__ import annotations

import json
import re
from dataclasses import replace

from ..errors import MalformedResponse, ProgramSyntaxError, ValidationError
from ..motion.parser import parse
from .providers import Provider
from .types import AmbiguityReportItem, ModelResponse, PromptBundle, ambiguity_from_jsonable

_FENCE_RE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.DOTALL)

_REPAIR_TEMPLATE = """\

## Repair

The program block in your previous reply was invalid:

    {error}

Previous reply:

{previous}

Return the corrected program and ambiguity blocks in the same format.
"""


def extract_blocks(raw_text: str) -> list[str]:
    return [m.group(1).strip() for m in _FENCE_RE.finditer(raw_text)]


def _parse_reply(raw_text: str):
    blocks = extract_blocks(raw_text)
    if not blocks:
        raise MalformedResponse("reply contains no fenced JSON block")
    program = parse(blocks[0])
    ambiguities: tuple[AmbiguityReportItem, ...] = ()
    if len(blocks) > 1:
        try:
            items = json.loads(blocks[1])
        except json.JSONDecodeError as exc:
            raise MalformedResponse(f"ambiguity block is not valid JSON: {exc}")
        if not isinstance(items, list):
            raise MalformedResponse("ambiguity block must be a JSON array")
        ambiguities = tuple(
            ambiguity_from_jsonable(item, f"/ambiguities/{i}")
            for i, item in enumerate(items)
        )
    return program, ambiguities


def repair_bundle(bundle: PromptBundle, previous_reply: str, error: str) -> PromptBundle:
    appended = _REPAIR_TEMPLATE.format(error=error, previous=previous_reply)
    return replace(bundle, user_text=bundle.user_text + appended)


def invoke(bundle: PromptBundle, provider: Provider) -> ModelResponse:
    raw_text = provider.complete(bundle)
    repair_count = 0
    try:
        program, ambiguities = _parse_reply(raw_text)
    except (ProgramSyntaxError, ValidationError, MalformedResponse) as exc:
        repair_count = 1
        raw_text = provider.complete(repair_bundle(bundle, raw_text, str(exc)))
        try:
            program, ambiguities = _parse_reply(raw_text)
        except (ProgramSyntaxError, ValidationError, MalformedResponse) as exc2:
            raise MalformedResponse(f"program still invalid after repair: {exc2}")
    return ModelResponse(
        raw_text=raw_text,
        program=program,
        ambiguities=ambiguities,
        usage={"repairCount": repair_count, "providerId": provider.id},
    )
