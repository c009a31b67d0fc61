import itertools

import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def naive_min_bisection(g):
    """Independent oracle: enumerate every +1 side containing vertex 0,
    count cut edges with a plain double loop over the edge list."""
    n = g.n
    edge_list = [(int(u), int(v)) for u, v in g.edges]
    best_cut = None
    best_side = None
    optima = 0
    for side in itertools.combinations(range(1, n), n // 2 - 1):
        members = {0, *side}
        cut = 0
        for u, v in edge_list:
            if (u in members) != (v in members):
                cut += 1
        if best_cut is None or cut < best_cut:
            best_cut = cut
            best_side = members
            optima = 1
        elif cut == best_cut:
            optima += 1
    labels = np.array([1 if v in best_side else -1 for v in range(n)], dtype=np.int8)
    return labels, best_cut, optima


@pytest.fixture
def naive_ml():
    return naive_min_bisection
