import os
import sys

import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from gpminer import from_edges

sys.path.insert(0, os.path.dirname(__file__))

# numba compiles on first call, so per-example deadlines are meaningless
settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def to_graph(G: nx.Graph, labels: dict | None = None):
    n = G.number_of_nodes()
    lab = None if labels is None else [labels[v] for v in range(n)]
    return from_edges(np.array(list(G.edges()), dtype=np.int64).reshape(-1, 2), n, labels=lab)


def random_labeled(seed: int, n: int, p: float, num_labels: int = 3):
    rng = np.random.default_rng(seed)
    G = nx.gnp_random_graph(n, p, seed=seed)
    labels = {v: int(rng.integers(num_labels)) for v in range(n)}
    return G, labels


@pytest.fixture
def triangle():
    return from_edges([(0, 1), (1, 2), (2, 0)])


@pytest.fixture
def path3():
    return from_edges([(0, 1), (1, 2)])


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
