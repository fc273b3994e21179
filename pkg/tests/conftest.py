import random

import pytest
from hypothesis import HealthCheck, settings

from iipg.graph_core import DiGraph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def random_digraph(n: int, p: float, seed: int, loops: bool = False) -> DiGraph:
    rng = random.Random(seed)
    return DiGraph.from_edges(n, [(u, v) for u in range(n) for v in range(n)
                                  if (u != v or loops) and rng.random() < p])


def path(n: int) -> DiGraph:
    return DiGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


@pytest.fixture
def fig4_graph():
    from iipg.generators import gen_fig4
    return gen_fig4().graph
