import random

import pytest

from pottsforge.graphs import WeightedGraph
from pottsforge.rationals import to_rat


@pytest.fixture
def rnd():
    return random.Random(20240817)


def random_multigraph(rnd, max_n=6, max_m=8, weight_pool=None):
    n = rnd.randint(1, max_n)
    m = rnd.randint(0, max_m)
    edges = []
    for _ in range(m):
        if n < 2:
            break
        u = rnd.randrange(n)
        v = rnd.randrange(n)
        while v == u:
            v = rnd.randrange(n)
        edges.append((u, v))
    if weight_pool is None:
        weights = [to_rat(rnd.randint(1, 5)) / rnd.randint(1, 5) for _ in edges]
    else:
        weights = [to_rat(rnd.choice(weight_pool)) for _ in edges]
    return WeightedGraph.build(n, edges, weights)
