from __future__ import annotations

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import random_heap  # noqa: E402


@pytest.fixture(scope="session")
def heap_corpus():
    """1000 randomized heaps shared by the oracle-agreement and soundness suites."""
    rng = random.Random(20240811)
    return [random_heap(rng) for _ in range(1000)]
