import pytest

from minkflow.acceptance import AcceptanceContext


@pytest.fixture(scope="session")
def ctx():
    """Shared acceptance context so the heavy flow runs happen once."""
    return AcceptanceContext()
