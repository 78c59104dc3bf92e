import random

import pytest

from diffmor.fixtures import FIXTURES, random_fixture


def blocks_of(space, strip=""):
    return [(b.name[len(strip):] if b.name.startswith(strip) else b.name, b.size) for b in space.blocks]


def dense_of(m):
    return [list(r) for r in m.to_dense()]


@pytest.fixture(params=sorted(FIXTURES))
def named(request):
    return request.param, FIXTURES[request.param]()


@pytest.fixture(scope="session")
def corpus():
    """The four named fixtures plus 25 seeded random ones."""
    rng = random.Random(7)
    out = [(name, mk()) for name, mk in sorted(FIXTURES.items())]
    weights = [0, 1, "1/2"]
    for k in range(25):
        from fractions import Fraction

        out.append((f"random-{k}", random_fixture(rng, Fraction(weights[k % 3]))))
    return out


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
