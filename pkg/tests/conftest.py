from __future__ import annotations

from fractions import Fraction as F

import pytest

from src import settings
from src.aiet import RhoMap
from src.torus import load_model

MODEL_PATH = settings.MODELS_DIR / "test_pentagon.json"


@pytest.fixture
def half_map() -> RhoMap:
    return RhoMap.unit(F(1, 2), F(1, 2), F(1, 2))


@pytest.fixture
def right_map() -> RhoMap:
    return RhoMap.unit(F(1, 2), F(1, 2), F(4, 5))


@pytest.fixture(scope="session")
def pentagon():
    return load_model(MODEL_PATH)


@pytest.fixture(scope="session")
def pentagon_float():
    return load_model(MODEL_PATH, "f64")


def first_return(t: RhoMap, lo, hi, x, limit: int = 10_000):
    """Iterate t until the orbit of x comes back into [lo, hi]."""
    y = t(x)
    for _ in range(limit):
        if lo <= y <= hi:
            return y
        y = t(y)
    raise AssertionError(f"no return of {x} within {limit} steps")
