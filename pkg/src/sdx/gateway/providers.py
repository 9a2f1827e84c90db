"""Model providers: deterministic fixture playback and an OpenAI-style
HTTP client. Selection is environment-driven (SDX_PROVIDER et al.)."""

from __future__ import annotations

import base64
import os
from typing import Mapping, Optional, Protocol

from ..errors import ProviderUnreachable, ValidationError
from .fixtures import FixtureStore
from .types import PromptBundle, bundle_digest

ENV_PROVIDER = "SDX_PROVIDER"
ENV_API_BASE = "SDX_API_BASE"
ENV_API_KEY = "SDX_API_KEY"
ENV_MODEL = "SDX_MODEL"
ENV_FIXTURES_DIR = "SDX_FIXTURES_DIR"


class Provider(Protocol):
    id: str

    def complete(self, bundle: PromptBundle) -> str:
        """Return the model's raw text for a prompt bundle."""


class FixtureProvider:
    """Replays recorded responses keyed by the prompt bundle digest."""

    id = "fixture"

    def __init__(self, fixtures_dir):
        self.store = FixtureStore(fixtures_dir)

    def complete(self, bundle: PromptBundle) -> str:
        return self.store.lookup_raw_text(bundle_digest(bundle))


class OpenAICompatProvider:
    """Minimal chat-completions client for any OpenAI-compatible endpoint."""

    id = "openai-compatible"

    def __init__(self, api_base: str, api_key: str, model: str, timeout: float = 120.0):
        self.api_base = api_base.rstrip("/")
        self.api_key = api_key
        self.model = model
        self.timeout = timeout

    def complete(self, bundle: PromptBundle) -> str:
        import httpx

        content: list[dict] = [{"type": "text", "text": bundle.user_text}]
        for name, media, data in bundle.images:
            url = f"data:{media};base64,{base64.b64encode(data).decode('ascii')}"
            content.append({"type": "image_url", "image_url": {"url": url}})
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": bundle.system_text},
                {"role": "user", "content": content},
            ],
        }
        headers = {"Authorization": f"Bearer {self.api_key}"}
        try:
            response = httpx.post(f"{self.api_base}/chat/completions",
                                  json=payload, headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise ProviderUnreachable(f"model endpoint unreachable: {exc}")
        if response.status_code != 200:
            raise ProviderUnreachable(
                f"model endpoint returned {response.status_code}: {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise ProviderUnreachable(f"unexpected completion payload: {exc}")


def provider_from_env(env: Optional[Mapping[str, str]] = None) -> Provider:
    env = os.environ if env is None else env
    provider_id = env.get(ENV_PROVIDER, "fixture")
    if provider_id == "fixture":
        fixtures_dir = env.get(ENV_FIXTURES_DIR)
        if not fixtures_dir:
            raise ValidationError(f"{ENV_FIXTURES_DIR} must be set for the fixture provider")
        return FixtureProvider(fixtures_dir)
    if provider_id == "openai-compatible":
        missing = [name for name in (ENV_API_BASE, ENV_API_KEY, ENV_MODEL) if not env.get(name)]
        if missing:
            raise ValidationError(f"missing environment: {', '.join(missing)}")
        return OpenAICompatProvider(env[ENV_API_BASE], env[ENV_API_KEY], env[ENV_MODEL])
    raise ValidationError(f"unknown provider: {provider_id}")
