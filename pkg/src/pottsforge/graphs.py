"""Graphs, hypergraphs, vertex partitions, and the line-oriented text format.

All structures are immutable after construction and hashable where it makes
sense, so they can be shared freely across threads and used as dict keys.
Parallel edges get their own dense ids; per-edge weights are independent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .rationals import Rat, rat_str, to_rat


class FormatError(ValueError):
    """Raised on malformed instance files."""


def _check_vertex(v: int, n: int) -> int:
    v = int(v)
    if not 0 <= v < n:
        raise ValueError(f"vertex {v} out of range [0,{n})")
    return v


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected multigraph with non-negative rational edge weights.

    Edge ids are dense 0..m-1 in the order given.  Self-loops are rejected:
    every edge must have distinct endpoints.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[Rat, ...]

    @staticmethod
    def build(n: int, edges: Iterable[tuple[int, int]], weights=None) -> "WeightedGraph":
        es = []
        for (u, v) in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            _check_vertex(u, n)
            _check_vertex(v, n)
            es.append((min(u, v), max(u, v)))
        if weights is None:
            ws = tuple(to_rat(1) for _ in es)
        elif isinstance(weights, (int, str)) or hasattr(weights, "numerator"):
            w = to_rat(weights)
            ws = tuple(w for _ in es)
        else:
            ws = tuple(to_rat(w) for w in weights)
        if len(ws) != len(es):
            raise ValueError("weight count does not match edge count")
        for w in ws:
            if w < 0:
                raise ValueError(f"negative edge weight {w}")
        return WeightedGraph(int(n), tuple(es), ws)

    @property
    def m(self) -> int:
        return len(self.edges)

    def weight_of(self, eid: int) -> Rat:
        return self.weights[eid]

    def check_subset(self, subset: Iterable[int]) -> tuple[int, ...]:
        ids = tuple(sorted(set(int(e) for e in subset)))
        if ids and (ids[0] < 0 or ids[-1] >= self.m):
            raise ValueError("edge id out of range")
        return ids


@dataclass(frozen=True)
class WeightedHypergraph:
    """Hypergraph with a multiset of hyperedges; vertices inside a hyperedge
    may repeat (the support set is what matters for connectivity)."""

    n: int
    hyperedges: tuple[tuple[int, ...], ...]
    weights: tuple[Rat, ...]

    @staticmethod
    def build(n: int, hyperedges: Iterable[Sequence[int]], weights=None) -> "WeightedHypergraph":
        hs = []
        for f in hyperedges:
            f = tuple(int(v) for v in f)
            if not f:
                raise ValueError("empty hyperedge")
            for v in f:
                _check_vertex(v, n)
            hs.append(tuple(sorted(f)))
        if weights is None:
            ws = tuple(to_rat(1) for _ in hs)
        elif isinstance(weights, (int, str)) or hasattr(weights, "numerator"):
            w = to_rat(weights)
            ws = tuple(w for _ in hs)
        else:
            ws = tuple(to_rat(w) for w in weights)
        if len(ws) != len(hs):
            raise ValueError("weight count does not match hyperedge count")
        for w in ws:
            if w < 0:
                raise ValueError(f"negative hyperedge weight {w}")
        return WeightedHypergraph(int(n), tuple(hs), ws)

    @property
    def m(self) -> int:
        return len(self.hyperedges)

    def arity(self):
        """Common hyperedge size, or None when not uniform."""
        sizes = {len(set(f)) for f in self.hyperedges}
        if len(sizes) == 1:
            return sizes.pop()
        return None

    def check_subset(self, subset: Iterable[int]) -> tuple[int, ...]:
        ids = tuple(sorted(set(int(e) for e in subset)))
        if ids and (ids[0] < 0 or ids[-1] >= self.m):
            raise ValueError("hyperedge id out of range")
        return ids

    def as_graph(self) -> WeightedGraph:
        """View a 2-uniform hypergraph as a weighted graph."""
        if self.arity() != 2:
            raise ValueError("hypergraph is not 2-uniform")
        return WeightedGraph.build(
            self.n, [tuple(sorted(set(f))) for f in self.hyperedges], self.weights
        )


@dataclass(frozen=True)
class BipartiteGraph:
    """Simple bipartite graph; edges are (left index, right index) pairs."""

    left: int
    right: int
    edges: frozenset[tuple[int, int]]

    @staticmethod
    def build(left: int, right: int, edges: Iterable[tuple[int, int]]) -> "BipartiteGraph":
        es = set()
        for (u, v) in edges:
            u, v = int(u), int(v)
            _check_vertex(u, left)
            _check_vertex(v, right)
            if (u, v) in es:
                raise ValueError(f"duplicate edge ({u},{v})")
            es.add((u, v))
        return BipartiteGraph(int(left), int(right), frozenset(es))

    @property
    def m(self) -> int:
        return len(self.edges)

    def right_neighbours(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(u for (u, w) in self.edges if w == v))

    def right_degrees(self) -> list[int]:
        degs = [0] * self.right
        for (_, v) in self.edges:
            degs[v] += 1
        return degs

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


# -- vertex partitions --------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Partition of a ground vertex list, in canonical form.

    Blocks are sorted tuples ordered by their minimum element, which makes
    partitions hashable and directly comparable.
    """

    ground: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(blocks: Iterable[Iterable[int]], ground=None) -> "Partition":
        bs = [tuple(sorted(set(int(v) for v in b))) for b in blocks if b]
        seen: set[int] = set()
        for b in bs:
            for v in b:
                if v in seen:
                    raise ValueError(f"element {v} appears in two blocks")
                seen.add(v)
        if ground is None:
            ground = sorted(seen)
        else:
            ground = sorted(int(v) for v in ground)
            missing = set(ground) - seen
            extra = seen - set(ground)
            if extra:
                raise ValueError(f"blocks mention {sorted(extra)} outside ground set")
            bs.extend((v,) for v in sorted(missing))
        bs.sort(key=lambda b: b[0])
        return Partition(tuple(ground), tuple(bs))

    @staticmethod
    def discrete(ground: Iterable[int]) -> "Partition":
        g = tuple(sorted(int(v) for v in ground))
        return Partition(g, tuple((v,) for v in g))

    @staticmethod
    def single_block(ground: Iterable[int]) -> "Partition":
        g = tuple(sorted(int(v) for v in ground))
        return Partition(g, (g,) if g else ())

    def __len__(self) -> int:
        return len(self.blocks)

    def block_of(self, v: int) -> tuple[int, ...]:
        for b in self.blocks:
            if v in b:
                return b
        raise KeyError(v)

    def extend(self, ground: Iterable[int]) -> "Partition":
        """Extend to a larger ground set with singleton blocks."""
        return Partition.of(self.blocks, ground=set(ground) | set(self.ground))

    def restrict(self, keep: Iterable[int]) -> "Partition":
        keep = set(int(v) for v in keep)
        blocks = [tuple(v for v in b if v in keep) for b in self.blocks]
        return Partition.of([b for b in blocks if b], ground=keep)


def partition_join(a: Partition, b: Partition) -> Partition:
    """Finest common coarsening; partitions over different subsets are first
    extended with singleton blocks onto the union ground set."""
    ground = set(a.ground) | set(b.ground)
    if set(a.ground) != ground:
        a = a.extend(ground)
    if set(b.ground) != ground:
        b = b.extend(ground)
    uf = _UnionFind(ground)
    for part in (a, b):
        for block in part.blocks:
            for v in block[1:]:
                uf.union(block[0], v)
    return uf.partition()


class _UnionFind:
    """Union-find over an arbitrary hashable ground set (no rollback)."""

    def __init__(self, ground: Iterable):
        self.parent = {v: v for v in ground}
        self.size = {v: 1 for v in self.parent}

    def find(self, v):
        p = self.parent
        root = v
        while p[root] != root:
            root = p[root]
        while p[v] != root:  # path compression
            p[v], v = root, p[v]
        return root

    def union(self, u, v) -> bool:
        ru, rv = self.find(u), self.find(v)
        if ru == rv:
            return False
        if self.size[ru] < self.size[rv]:
            ru, rv = rv, ru
        self.parent[rv] = ru
        self.size[ru] += self.size[rv]
        return True

    def partition(self) -> Partition:
        groups: dict = {}
        for v in self.parent:
            groups.setdefault(self.find(v), []).append(v)
        return Partition.of(groups.values(), ground=self.parent.keys())


def connected_components(g: WeightedGraph, subset: Iterable[int]) -> tuple[int, Partition]:
    """Component count and induced vertex partition of (V, subset)."""
    ids = g.check_subset(subset)
    uf = _UnionFind(range(g.n))
    for eid in ids:
        u, v = g.edges[eid]
        uf.union(u, v)
    part = uf.partition()
    return len(part), part


def hyper_components(h: WeightedHypergraph, subset: Iterable[int]) -> tuple[int, Partition]:
    """Components under hyperedge connectivity: a hyperedge merges all its
    vertices into one block."""
    ids = h.check_subset(subset)
    uf = _UnionFind(range(h.n))
    for fid in ids:
        f = h.hyperedges[fid]
        for v in f[1:]:
            uf.union(f[0], v)
    part = uf.partition()
    return len(part), part


# -- text instance format -----------------------------------------------------
#
#   # comment lines start with '#'
#   graph <n> <m>          followed by m lines: u v gamma
#   hypergraph <n> <m>     followed by m lines: k v1 ... vk gamma
#   bipartite <nL> <nR> <m> followed by m lines: u v
#
# gamma is an exact fraction 'p/q' or an integer.

def parse_instance(text: str):
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not lines:
        raise FormatError("empty instance")
    header = lines[0].split()
    body = lines[1:]
    kind = header[0]
    try:
        if kind == "graph":
            n, m = int(header[1]), int(header[2])
            if len(body) != m:
                raise FormatError(f"expected {m} edge lines, found {len(body)}")
            edges, weights = [], []
            for ln in body:
                parts = ln.split()
                edges.append((int(parts[0]), int(parts[1])))
                weights.append(to_rat(parts[2]) if len(parts) > 2 else to_rat(1))
            return WeightedGraph.build(n, edges, weights)
        if kind == "hypergraph":
            n, m = int(header[1]), int(header[2])
            if len(body) != m:
                raise FormatError(f"expected {m} hyperedge lines, found {len(body)}")
            hs, ws = [], []
            for ln in body:
                parts = ln.split()
                k = int(parts[0])
                verts = [int(x) for x in parts[1 : 1 + k]]
                if len(verts) != k:
                    raise FormatError(f"hyperedge line too short: {ln!r}")
                rest = parts[1 + k :]
                hs.append(verts)
                ws.append(to_rat(rest[0]) if rest else to_rat(1))
            return WeightedHypergraph.build(n, hs, ws)
        if kind == "bipartite":
            nl, nr, m = int(header[1]), int(header[2]), int(header[3])
            if len(body) != m:
                raise FormatError(f"expected {m} edge lines, found {len(body)}")
            edges = []
            for ln in body:
                parts = ln.split()
                edges.append((int(parts[0]), int(parts[1])))
            return BipartiteGraph.build(nl, nr, edges)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed instance: {exc}") from exc
    raise FormatError(f"unknown instance kind {kind!r}")


def serialize_instance(obj) -> str:
    if isinstance(obj, WeightedGraph):
        lines = [f"graph {obj.n} {obj.m}"]
        for (u, v), w in zip(obj.edges, obj.weights):
            lines.append(f"{u} {v} {rat_str(w)}")
        return "\n".join(lines) + "\n"
    if isinstance(obj, WeightedHypergraph):
        lines = [f"hypergraph {obj.n} {obj.m}"]
        for f, w in zip(obj.hyperedges, obj.weights):
            lines.append(f"{len(f)} " + " ".join(str(v) for v in f) + f" {rat_str(w)}")
        return "\n".join(lines) + "\n"
    if isinstance(obj, BipartiteGraph):
        lines = [f"bipartite {obj.left} {obj.right} {obj.m}"]
        for (u, v) in obj.sorted_edges():
            lines.append(f"{u} {v}")
        return "\n".join(lines) + "\n"
    raise TypeError(f"cannot serialize {type(obj).__name__}")
