import hypothesis
import pytest

hypothesis.settings.register_profile(
    "suite", deadline=None, max_examples=40, derandomize=True
)
hypothesis.settings.load_profile("suite")


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240817)
