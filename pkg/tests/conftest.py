import os

import hypothesis
import numpy as np
import pytest

from mmskit.core.config import RunConfig

np.seterr(all="warn")

hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=300, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def config():
    return RunConfig(seed=42)


@pytest.fixture
def rng():
    return np.random.default_rng(np.random.SeedSequence(20240601))
