"""Pytest configuration shared by the test suite and the doctests."""

from collections.abc import Iterator

import numpy as np
import pytest


@pytest.fixture(autouse=True)
def _legacy_numpy_repr(request: pytest.FixtureRequest) -> Iterator[None]:
    """Print NumPy scalars as plain numbers in doctests (NumPy 1.x repr)."""
    if isinstance(request.node, pytest.DoctestItem):
        with np.printoptions(legacy="1.25"):
            yield
    else:
        yield
