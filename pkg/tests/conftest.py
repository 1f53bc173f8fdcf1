import random
import sys
from itertools import combinations
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fodp.graph import ColoredRootedGraph  # noqa: E402


def all_graphs(n):
    """Every labelled simple graph on vertices 0..n-1."""
    pairs = list(combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        yield ColoredRootedGraph.build(range(n), [e for i, e in enumerate(pairs) if mask >> i & 1])


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    acc = sys.modules.get("test_acceptance")
    if acc is None or not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(acc.RESULTS):
        terminalreporter.write_line(acc.RESULTS[num])
