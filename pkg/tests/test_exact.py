import pytest

from pottsforge import exact
from pottsforge.errors import EnumerationCapError
from pottsforge.graphs import WeightedGraph, WeightedHypergraph
from pottsforge.rationals import ONE, to_rat


def tutte_reference(g, q):
    """Literal definition: loop over all subsets, recomputing components."""
    from pottsforge.graphs import connected_components

    q = to_rat(q)
    total = to_rat(0)
    for mask in range(1 << g.m):
        subset = [e for e in range(g.m) if mask >> e & 1]
        count, _ = connected_components(g, subset)
        term = q**count
        for e in subset:
            term *= g.weights[e]
        total += term
    return total


class TestTutteGraph:
    def test_spec_examples(self):
        g = WeightedGraph.build(2, [(0, 1)], 1)
        assert exact.tutte_graph(g, 2) == 6
        assert exact.tutte_graph(WeightedGraph.build(3, [], None), 2) == 8
        tri = WeightedGraph.build(3, [(0, 1), (1, 2), (0, 2)], 1)
        assert exact.tutte_graph(tri, 2) == 28

    def test_matches_reference_on_random_graphs(self, rnd):
        from tests.conftest import random_multigraph

        for _ in range(40):
            g = random_multigraph(rnd, max_n=5, max_m=7)
            q = to_rat(rnd.randint(1, 4)) / rnd.randint(1, 3)
            assert exact.tutte_graph(g, q) == tutte_reference(g, q)

    def test_cap(self):
        g = WeightedGraph.build(2, [(0, 1)] * 30, 1)
        with pytest.raises(EnumerationCapError):
            exact.tutte_graph(g, 2)
        # explicit override allows it
        assert exact.tutte_graph(g, 1, max_edges=30) == 1 * (1 + 1) ** 30

    def test_env_cap(self, monkeypatch):
        monkeypatch.setenv("POTTSFORGE_CAP", "2")
        tri = WeightedGraph.build(3, [(0, 1), (1, 2), (0, 2)], 1)
        with pytest.raises(EnumerationCapError):
            exact.tutte_graph(tri, 2)

    def test_multiplicative_over_disjoint_union(self, rnd):
        from tests.conftest import random_multigraph

        for _ in range(20):
            g1 = random_multigraph(rnd, max_n=4, max_m=4)
            g2 = random_multigraph(rnd, max_n=4, max_m=4)
            union = WeightedGraph.build(
                g1.n + g2.n,
                list(g1.edges) + [(u + g1.n, v + g1.n) for (u, v) in g2.edges],
                list(g1.weights) + list(g2.weights),
            )
            q = to_rat("5/2")
            assert exact.tutte_graph(union, q) == \
                exact.tutte_graph(g1, q) * exact.tutte_graph(g2, q)


class TestTutteHypergraph:
    def test_spec_examples(self):
        h = WeightedHypergraph.build(3, [(0, 1, 2)], 2)
        assert exact.tutte_hypergraph(h, 3) == 33
        empty = WeightedHypergraph.build(4, [], None)
        assert exact.tutte_hypergraph(empty, 3) == 81
        apex = WeightedHypergraph.build(2, [(0, 1)], 2)
        assert exact.tutte_hypergraph(apex, 3) == 15

    def test_two_uniform_matches_graph(self, rnd):
        from tests.conftest import random_multigraph

        for _ in range(25):
            g = random_multigraph(rnd, max_n=5, max_m=6)
            h = WeightedHypergraph.build(g.n, [tuple(e) for e in g.edges], g.weights)
            q = to_rat(rnd.randint(1, 5))
            assert exact.tutte_hypergraph(h, q) == exact.tutte_graph(g, q)


class TestPotts:
    def test_spec_examples(self):
        tri = WeightedHypergraph.build(3, [(0, 1), (1, 2), (0, 2)], 1)
        assert exact.potts(tri, 2) == 28
        assert exact.potts(WeightedHypergraph.build(3, [], None), 5) == 125
        h = WeightedHypergraph.build(3, [(0, 1, 2)], 2)
        assert exact.potts(h, 3) == 33

    def test_rejects_non_integer_q(self):
        h = WeightedHypergraph.build(2, [(0, 1)], 1)
        with pytest.raises(ValueError):
            exact.potts(h, to_rat("5/2"))
        with pytest.raises(ValueError):
            exact.potts(h, 0)

    def test_repeated_vertices_act_as_support(self):
        h1 = WeightedHypergraph.build(2, [(0, 0, 1)], 3)
        h2 = WeightedHypergraph.build(2, [(0, 1)], 3)
        assert exact.potts(h1, 2) == exact.potts(h2, 2)


def test_fk_small_sweep():
    # subset of the full acceptance sweep
    import itertools

    for n in (2, 3):
        supports = []
        for size in range(1, n + 1):
            supports.extend(itertools.combinations(range(n), size))
        for combo in itertools.combinations_with_replacement(supports, 2):
            h = WeightedHypergraph.build(n, combo, 2)
            assert exact.fk_check(h, 3)


class TestTerminalSplit:
    def test_spec_examples(self):
        g = WeightedGraph.build(2, [(0, 1)], to_rat("3/2"))
        ts = exact.terminal_split(g, 0, 1, 2)
        assert ts.z_joined == 2 * to_rat("3/2")
        assert ts.z_split == 4
        # disconnected terminals
        g2 = WeightedGraph.build(4, [(0, 1), (2, 3)], 1)
        ts2 = exact.terminal_split(g2, 0, 2, 2)
        assert ts2.z_joined == 0
        # two parallel edges weight gamma
        gam = to_rat("2/3")
        gp = WeightedGraph.build(2, [(0, 1), (0, 1)], gam)
        ts3 = exact.terminal_split(gp, 0, 1, 2)
        assert ts3.z_joined == 2 * (2 * gam + gam * gam)
        assert ts3.z_split == 4

    def test_split_sums_to_tutte(self, rnd):
        from tests.conftest import random_multigraph

        for _ in range(200):
            g = random_multigraph(rnd, max_n=5, max_m=6)
            if g.n < 2:
                continue
            s, t = 0, 1 + rnd.randrange(g.n - 1)
            q = to_rat(rnd.randint(1, 4))
            ts = exact.terminal_split(g, s, t, q)
            assert ts.total == exact.tutte_graph(g, q)

    def test_same_terminal_rejected(self):
        g = WeightedGraph.build(2, [(0, 1)], 1)
        with pytest.raises(ValueError):
            exact.terminal_split(g, 1, 1, 2)


class TestPartitionSweep:
    def test_matches_enumeration(self, rnd):
        from tests.conftest import random_multigraph

        for _ in range(40):
            g = random_multigraph(rnd, max_n=6, max_m=8)
            q = to_rat(rnd.randint(1, 5)) / rnd.randint(1, 2)
            assert exact.tutte_graph_sweep(g, q) == exact.tutte_graph(g, q)

    def test_terminal_split_sweep_matches(self, rnd):
        from tests.conftest import random_multigraph

        for _ in range(40):
            g = random_multigraph(rnd, max_n=5, max_m=7)
            if g.n < 2:
                continue
            s, t = 0, g.n - 1
            q = to_rat("7/3")
            a = exact.terminal_split(g, s, t, q)
            b = exact.terminal_split_sweep(g, s, t, q)
            assert (a.z_joined, a.z_split) == (b.z_joined, b.z_split)

    def test_handles_isolated_vertices(self):
        g = WeightedGraph.build(5, [(1, 2)], to_rat(2))
        assert exact.tutte_graph_sweep(g, 3) == exact.tutte_graph(g, 3)
        ts = exact.terminal_split_sweep(g, 0, 4, 3)
        assert ts.z_joined == 0
        assert ts.total == exact.tutte_graph(g, 3)

    def test_long_chain_far_beyond_enumeration(self):
        # 60-edge path: enumeration impossible, sweep exact
        n = 61
        g = WeightedGraph.build(n, [(i, i + 1) for i in range(60)], to_rat("1/2"))
        val = exact.tutte_graph_sweep(g, 2)
        # Z of a path factorises: q * prod_e (q + gamma_e)  [one new component
        # or absorbed per edge]
        assert val == 2 * (2 + to_rat("1/2")) ** 60


def test_exact_y_distribution_spec_examples():
    from pottsforge.gadget import GadgetSpec

    # t=1: single terminal, Pr(Y=1)=1
    spec = GadgetSpec(2, 1, to_rat("1/8"), to_rat("1/3"), True)
    dist = exact.exact_y_distribution(spec, 3)
    assert dist == {1: ONE}
    # t=2, N=1: enumerate the 4 subsets of the two terminal-clique edges
    spec2 = GadgetSpec(1, 2, to_rat(0), to_rat("1/3"), True)
    w = spec2.gamma_dblprime
    q = to_rat(3)
    z1 = w * w  # both edges join everything: Y=1, no terminal-free part
    z2 = q + 2 * w  # empty set leaves the clique vertex isolated; one edge
    dist2 = exact.exact_y_distribution(spec2, 3)
    assert dist2[1] == z1 / (z1 + z2)
    assert dist2[2] == z2 / (z1 + z2)
    assert sum(dist2.values(), to_rat(0)) == 1
