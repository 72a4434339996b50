from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from interlace.config import configure_settings, reset_settings
from interlace.services.metric_service import validate_metric


@pytest.fixture(autouse=True)
def fresh_settings():
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def small_budgets():
    return configure_settings(enumeration_cap=5000, search_element_bound=64)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def two_point_metric():
    return validate_metric(["p", "q"], [[0, 2], [2, 0]])


@pytest.fixture
def path_metric():
    """Three points on a line at 0, 1/2 and 2."""
    return validate_metric(
        ["a", "b", "c"],
        [
            [0, Fraction(1, 2), 2],
            [Fraction(1, 2), 0, Fraction(3, 2)],
            [2, Fraction(3, 2), 0],
        ],
    )
