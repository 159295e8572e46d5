import pytest

from mtshapes import build_hasse


@pytest.fixture(scope="session")
def hasse():
    """Covering graphs for small tip counts, built once per session."""
    return {n: build_hasse(n) for n in range(2, 8)}
