import itertools

import numpy as np
import pytest

from localcut import graph as gr
from localcut.walks import WalkOperator

FIXTURES = {
    "K2": lambda: gr.complete(2),
    "C4": lambda: gr.cycle(4),
    "C8": lambda: gr.cycle(8),
    "K4": lambda: gr.complete(4),
    "dumbbell3": lambda: gr.dumbbell(3),
    "dumbbell5": lambda: gr.dumbbell(5),
}


def fixture_graphs():
    return {name: make() for name, make in FIXTURES.items()}


def all_subsets(g):
    """Every nonempty proper subset, as sorted arrays."""
    for r in range(1, g.n):
        for c in itertools.combinations(range(g.n), r):
            yield np.array(c, dtype=np.int64)


def representative_sets(g):
    """A handful of structurally different proper sets per graph."""
    half = (g.n + 1) // 2
    cands = [[0], [0, 1], list(range(half)), list(range(g.n - 1)), [g.n - 1], list(range(0, g.n, 2))]
    seen, out = set(), []
    for c in cands:
        s = tuple(sorted(set(c)))
        if 0 < len(s) < g.n and s not in seen:
            seen.add(s)
            out.append(np.array(s, dtype=np.int64))
    return out


@pytest.fixture
def c4():
    return gr.cycle(4)


@pytest.fixture
def k2():
    return gr.complete(2)


@pytest.fixture
def db5():
    return gr.dumbbell(5)


@pytest.fixture
def op_c4(c4):
    return WalkOperator(c4)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.format_results():
        terminalreporter.write_line(line)
