import time

import pytest

import rayvex as rx
from rayvex import envelope as env

SESSION_START = time.perf_counter()


def pytest_collection_modifyitems(session, config, items):
    # Acceptance criteria run last so the runtime criterion sees the whole session.
    items.sort(key=lambda item: item.fspath.basename == "test_acceptance.py")


def session_elapsed() -> float:
    return time.perf_counter() - SESSION_START


@pytest.fixture(scope="session")
def catalog_models():
    """All five catalog models, certified once at budget 10^4, seed 0."""
    out = {}
    for entry in rx.catalog():
        model = env.build(
            entry.field,
            entry.default_polytope,
            sense=entry.build_sense,
            anchor=entry.default_anchor,
            budget=10_000,
            seed=0,
        )
        out[entry.name] = (entry, model)
    return out
