import pytest

from helpers import load_f2


@pytest.fixture(scope="session")
def f2():
    """(instance, oracle, source_model) for the bundled two-client fixture."""
    return load_f2()
