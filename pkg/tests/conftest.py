import sys
from functools import lru_cache

import pytest

from pg3.field import field_of_order
from pg3.quadric import secant_family, standard_hyperbolic
from pg3.space import build_geometry


@lru_cache(maxsize=None)
def geometry(q):
    return build_geometry(field_of_order(q))


@lru_cache(maxsize=None)
def standard(q):
    return standard_hyperbolic(geometry(q))


@lru_cache(maxsize=None)
def secants(q):
    return secant_family(standard(q))


@pytest.fixture(scope="session")
def g3():
    return geometry(3)


@pytest.fixture(scope="session")
def g5():
    return geometry(5)


@pytest.fixture(scope="session")
def s3():
    return secants(3)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
