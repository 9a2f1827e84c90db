from __future__ import annotations

import pytest

from sdx.gateway.fixtures import FixtureStore


@pytest.fixture
def fixture_store(tmp_path) -> FixtureStore:
    return FixtureStore(tmp_path / "fixtures")
