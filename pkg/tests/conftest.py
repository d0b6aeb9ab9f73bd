import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import tight_prior_instance, anchor_instance, reference_latent  # noqa: E402


@pytest.fixture
def anchor():
    return anchor_instance()


@pytest.fixture
def tight_prior():
    return tight_prior_instance()


@pytest.fixture
def reference():
    return reference_latent()
