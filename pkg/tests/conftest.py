import math

import numpy as np
import pytest

from leafscope.group import FuchsianGroupSpec, cyclic_group, hyperbolic_along


def brute_force_ball(generators, depth):
    """Reduced words up to ``depth`` as 2x2 matrices, built without the package."""
    letters = []
    for g in generators:
        m = np.array([[g.a, g.b], [np.conj(g.b), np.conj(g.a)]])
        letters += [m, np.linalg.inv(m)]
    out, frontier = [], [((k,), letters[k]) for k in range(len(letters))]
    for _ in range(depth):
        out += frontier
        nxt = []
        for word, m in frontier:
            for k in range(len(letters)):
                if k == word[-1] ^ 1:
                    continue
                nxt.append((word + (k,), m @ letters[k]))
        frontier = nxt
    return out


@pytest.fixture(scope="session")
def cyclic06():
    return cyclic_group(0.6)


@pytest.fixture(scope="session")
def pingpong():
    return FuchsianGroupSpec((hyperbolic_along(0.0, 0.9), hyperbolic_along(math.pi / 2, 0.9)), ("g", "h"))


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
