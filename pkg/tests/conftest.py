"""
Shared pytest fixtures.
"""
import os
import sys

import numpy as np
import pytest

# Add repository root to path for imports
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from tritforge.utils.qudit_core import QuditRegister  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def qutrits3():
    return QuditRegister.qutrits(3)


@pytest.fixture(autouse=True)
def _no_seed_env(monkeypatch):
    monkeypatch.delenv("TRITFORGE_SEED", raising=False)
