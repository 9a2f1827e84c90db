"""Content-addressed fixture store for deterministic model playback.

Files live flat in one directory: `<digest>.request.json` holds the
canonical prompt bundle (for humans and drift debugging) and
`<digest>.response.json` holds the exact bytes returned for it.
"""

from __future__ import annotations

import json
import os
import threading

from ..errors import FixtureMiss
from ..jsoncanon import dumps_canonical
from .types import PromptBundle, bundle_digest, bundle_jsonable


class FixtureStore:
    def __init__(self, root):
        self.root = str(root)
        self._write_lock = threading.Lock()

    def _response_path(self, digest: str) -> str:
        return os.path.join(self.root, f"{digest}.response.json")

    def _request_path(self, digest: str) -> str:
        return os.path.join(self.root, f"{digest}.request.json")

    def record(self, digest: str, response_bytes: bytes,
               request_bytes: bytes | None = None) -> None:
        with self._write_lock:
            os.makedirs(self.root, exist_ok=True)
            _atomic_write(self._response_path(digest), response_bytes)
            if request_bytes is not None:
                _atomic_write(self._request_path(digest), request_bytes)

    def record_bundle(self, bundle: PromptBundle, raw_text: str) -> str:
        """Store a canned raw response for a prompt bundle; returns the digest."""
        digest = bundle_digest(bundle)
        response = json.dumps({"rawText": raw_text}, ensure_ascii=False, indent=2)
        request = dumps_canonical(bundle_jsonable(bundle))
        self.record(digest, response.encode("utf-8"), request.encode("utf-8"))
        return digest

    def lookup(self, digest: str) -> bytes:
        path = self._response_path(digest)
        try:
            with open(path, "rb") as fh:
                return fh.read()
        except FileNotFoundError:
            raise FixtureMiss(f"no recorded response for digest {digest}")

    def lookup_raw_text(self, digest: str) -> str:
        payload = json.loads(self.lookup(digest).decode("utf-8"))
        if not isinstance(payload, dict) or "rawText" not in payload:
            raise FixtureMiss(f"response file for {digest} lacks rawText")
        return payload["rawText"]


def _atomic_write(path: str, data: bytes) -> None:
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def record_fixture(store: FixtureStore, digest: str, response_bytes: bytes) -> None:
    store.record(digest, response_bytes)


def lookup_fixture(store: FixtureStore, digest: str) -> bytes:
    return store.lookup(digest)
