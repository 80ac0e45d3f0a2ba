import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pottsforge.graphs import (
    BipartiteGraph,
    FormatError,
    Partition,
    WeightedGraph,
    WeightedHypergraph,
    connected_components,
    hyper_components,
    parse_instance,
    partition_join,
    serialize_instance,
)
from pottsforge.rationals import to_rat


def bfs_components(n, edges, subset):
    """Independent component counter for cross-checking union-find."""
    adj = {v: set() for v in range(n)}
    for eid in subset:
        u, v = edges[eid]
        adj[u].add(v)
        adj[v].add(u)
    seen = set()
    comps = 0
    for v in range(n):
        if v in seen:
            continue
        comps += 1
        stack = [v]
        seen.add(v)
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    return comps


class TestWeightedGraph:
    def test_build_and_invariants(self):
        g = WeightedGraph.build(3, [(2, 0), (0, 1)], ["1/2", 3])
        assert g.m == 2
        assert g.edges[0] == (0, 2)  # endpoints normalised
        assert g.weight_of(0) == to_rat("1/2")

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            WeightedGraph.build(2, [(0, 0)], 1)  # self-loop
        with pytest.raises(ValueError):
            WeightedGraph.build(2, [(0, 5)], 1)
        with pytest.raises(ValueError):
            WeightedGraph.build(2, [(0, 1)], [to_rat(-1)])
        with pytest.raises(ValueError):
            WeightedGraph.build(2, [(0, 1)], [1, 2])

    def test_parallel_edges_have_own_ids(self):
        g = WeightedGraph.build(2, [(0, 1), (0, 1)], ["1/2", "1/3"])
        assert g.m == 2
        assert g.weights[0] != g.weights[1]


class TestComponents:
    def test_spec_examples(self):
        g0 = WeightedGraph.build(3, [], None)
        assert connected_components(g0, [])[0] == 3
        tri = WeightedGraph.build(3, [(0, 1), (1, 2), (0, 2)], 1)
        count, part = connected_components(tri, [0, 1, 2])
        assert count == 1 and len(part.blocks) == 1
        g = WeightedGraph.build(3, [(0, 1)], 1)
        count, part = connected_components(g, [0])
        assert count == 2
        assert part.blocks == ((0, 1), (2,))

    def test_out_of_range(self):
        g = WeightedGraph.build(2, [(0, 1)], 1)
        with pytest.raises(ValueError):
            connected_components(g, [5])

    def test_against_bfs(self, rnd):
        for _ in range(200):
            n = rnd.randint(1, 12)
            edges = []
            for _ in range(rnd.randint(0, 16)):
                u, v = rnd.randrange(n), rnd.randrange(n)
                if u != v:
                    edges.append((u, v))
            g = WeightedGraph.build(n, edges, 1)
            subset = [e for e in range(g.m) if rnd.random() < 0.5]
            count, part = connected_components(g, subset)
            assert count == bfs_components(n, g.edges, subset)
            assert count == len(part.blocks)


class TestHyperComponents:
    def test_spec_examples(self):
        h = WeightedHypergraph.build(4, [(0, 1, 2)], 1)
        count, part = hyper_components(h, [0])
        assert count == 2
        assert part.blocks == ((0, 1, 2), (3,))
        assert hyper_components(h, [])[0] == 4
        h2 = WeightedHypergraph.build(4, [(0, 1), (1, 2)], 1)
        count, part = hyper_components(h2, [0, 1])
        assert part.block_of(0) == (0, 1, 2)

    def test_rejects(self):
        with pytest.raises(ValueError):
            WeightedHypergraph.build(3, [()], 1)
        h = WeightedHypergraph.build(3, [(0, 1)], 1)
        with pytest.raises(ValueError):
            hyper_components(h, [3])


class TestPartition:
    def test_canonical_form(self):
        p = Partition.of([[3, 1], [2]])
        assert p.blocks == ((1, 3), (2,))
        assert p.ground == (1, 2, 3)

    def test_join_spec_examples(self):
        a = Partition.of([[1, 2], [3]])
        b = Partition.of([[2, 3], [1]])
        assert partition_join(a, b).blocks == ((1, 2, 3),)
        p = Partition.of([[1, 2], [3]])
        assert partition_join(p, p) == p
        bottom = Partition.discrete([1, 2, 3])
        assert partition_join(bottom, p) == p

    def test_join_extends_with_singletons(self):
        a = Partition.of([[0, 1]])
        b = Partition.of([[2, 3]])
        j = partition_join(a, b)
        assert j.blocks == ((0, 1), (2, 3))

    def test_disjointness_enforced(self):
        with pytest.raises(ValueError):
            Partition.of([[1, 2], [2, 3]])

    def test_restrict(self):
        p = Partition.of([[0, 1, 4], [2], [3]])
        assert p.restrict([0, 1, 2]).blocks == ((0, 1), (2,))


def partitions_of(elems):
    """All set partitions of a small list."""
    if not elems:
        yield []
        return
    first, rest = elems[0], elems[1:]
    for sub in partitions_of(rest):
        yield [[first]] + sub
        for i in range(len(sub)):
            yield sub[:i] + [sub[i] + [first]] + sub[i + 1:]


@st.composite
def small_partition(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    opts = list(partitions_of(list(range(n))))
    blocks = draw(st.sampled_from(opts))
    return Partition.of(blocks, ground=range(n))


@settings(max_examples=120, deadline=None)
@given(small_partition(), small_partition(), small_partition())
def test_join_laws(a, b, c):
    ground = set(a.ground) | set(b.ground) | set(c.ground)
    a, b, c = (p.extend(ground) for p in (a, b, c))
    assert partition_join(a, b) == partition_join(b, a)
    assert partition_join(a, a) == a
    assert partition_join(partition_join(a, b), c) == partition_join(a, partition_join(b, c))


class TestTextFormat:
    def test_roundtrip_all_kinds(self):
        samples = [
            WeightedGraph.build(4, [(0, 1), (0, 1), (2, 3)], ["1/2", 1, "9/7"]),
            WeightedHypergraph.build(5, [(0, 1, 2), (3,)], ["2/3", 4]),
            BipartiteGraph.build(2, 2, [(0, 0), (1, 1)]),
        ]
        for inst in samples:
            text = serialize_instance(inst)
            again = parse_instance(text)
            assert serialize_instance(again) == text

    def test_comments_and_errors(self):
        text = "# a triangle\ngraph 3 3\n0 1 1\n1 2 1\n0 2 1\n"
        g = parse_instance(text)
        assert g.m == 3
        with pytest.raises(FormatError):
            parse_instance("graph 3 2\n0 1 1\n")
        with pytest.raises(FormatError):
            parse_instance("whatever 1 2\n")
        with pytest.raises(FormatError):
            parse_instance("")
        with pytest.raises(FormatError):
            parse_instance("hypergraph 3 1\n5 0 1 2\n")
