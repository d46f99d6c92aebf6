from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from humanoid_wbc.layout import h1_layout

settings.register_profile("repo", deadline=None)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def layout():
    return h1_layout()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
