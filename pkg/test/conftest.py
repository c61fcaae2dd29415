import pytest

from dynrank.core.constants import THREADS_ENV_VAR
from dynrank.utilities.random import set_random_seed


@pytest.fixture(autouse=True)
def stabilize_random():
    set_random_seed(42)
    yield


@pytest.fixture(autouse=True)
def isolate_threads_env(monkeypatch):
    # thread count of the host shell must not leak into engine defaults
    monkeypatch.delenv(THREADS_ENV_VAR, raising=False)
    yield
