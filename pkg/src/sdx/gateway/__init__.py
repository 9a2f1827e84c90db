"""Interpretation gateway: prompts, providers, fixtures, structured replies."""

from .fixtures import FixtureStore, lookup_fixture, record_fixture
from .invoke import extract_blocks, invoke, repair_bundle
from .prompts import SYSTEM_TEXT, build_prompt
from .providers import (
    ENV_API_BASE,
    ENV_API_KEY,
    ENV_FIXTURES_DIR,
    ENV_MODEL,
    ENV_PROVIDER,
    FixtureProvider,
    OpenAICompatProvider,
    Provider,
    provider_from_env,
)
from .types import (
    AmbiguityOption,
    AmbiguityParameter,
    AmbiguityReportItem,
    GenerationRequest,
    ModelResponse,
    PromptBundle,
    RefinementContext,
    ResolutionNote,
    ambiguity_from_jsonable,
    ambiguity_jsonable,
    bundle_digest,
    bundle_jsonable,
)

__all__ = [
    "AmbiguityOption",
    "AmbiguityParameter",
    "AmbiguityReportItem",
    "ENV_API_BASE",
    "ENV_API_KEY",
    "ENV_FIXTURES_DIR",
    "ENV_MODEL",
    "ENV_PROVIDER",
    "FixtureProvider",
    "FixtureStore",
    "GenerationRequest",
    "ModelResponse",
    "OpenAICompatProvider",
    "PromptBundle",
    "Provider",
    "RefinementContext",
    "ResolutionNote",
    "SYSTEM_TEXT",
    "ambiguity_from_jsonable",
    "ambiguity_jsonable",
    "build_prompt",
    "bundle_digest",
    "bundle_jsonable",
    "extract_blocks",
    "invoke",
    "lookup_fixture",
    "provider_from_env",
    "record_fixture",
    "repair_bundle",
]
