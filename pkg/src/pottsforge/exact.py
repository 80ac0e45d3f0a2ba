"""Exact partition-function oracles.

Two independent engines live here:

* brute-force subset/colouring enumeration (the trusted oracle, capped at
  POTTSFORGE_CAP edges, default 24), and
* a partition-state sweep along the edge list, exact for any graph but only
  practical when the active frontier stays small (series-parallel
  expansions, chains of gadgets).

The two are cross-checked against each other in the test suite; neither is
ever silently replaced by an approximation.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import EnumerationCapError
from .graphs import WeightedGraph, WeightedHypergraph
from .rationals import ONE, Rat, to_rat

DEFAULT_CAP = 24


def enumeration_cap(max_edges=None) -> int:
    if max_edges is not None:
        return int(max_edges)
    return int(os.environ.get("POTTSFORGE_CAP", DEFAULT_CAP))


def _require_cap(m: int, max_edges, what: str):
    cap = enumeration_cap(max_edges)
    if m > cap:
        raise EnumerationCapError(
            f"instance too large for exact oracle: {what} has {m} items, cap {cap}"
        )


def _weight_classes(weights):
    """Group identical weights; returns (class id per edge, class values)."""
    values: list[Rat] = []
    index: dict = {}
    cls = []
    for w in weights:
        key = (w.numerator, w.denominator)
        if key not in index:
            index[key] = len(values)
            values.append(w)
        cls.append(index[key])
    return cls, values


def class_counts(g: WeightedGraph, terminals=(), max_edges=None):
    """Subset census of g: counts[k, l, a_0, ...] over all 2^m edge subsets
    (k terminal components, l other components, a_c edges of weight class c).
    Returns (counts, class values)."""
    _require_cap(g.m, max_edges, "graph")
    cls, values = _weight_classes(g.weights)
    term = [False] * g.n
    for v in terminals:
        term[int(v)] = True
    cells = (sum(term) + 1) * (g.n - sum(term) + 1)
    for c in range(len(values)):
        cells *= cls.count(c) + 1
    if cells > (1 << 22):
        raise EnumerationCapError(
            f"census table would need {cells} cells; too many distinct weights"
        )
    eu = [e[0] for e in g.edges]
    ev = [e[1] for e in g.edges]
    counts = backend.subset_class_counts(g.n, eu, ev, cls, len(values), term)
    return counts, values


def _fold_counts(counts, values, q: Rat, k_power_of_q: bool):
    """Sum counts[k, l, a...] * q^(l + [k if k_power_of_q]) * prod w_c^a_c."""
    q = to_rat(q)
    total = to_rat(0)
    kdim, ldim = counts.shape[0], counts.shape[1]
    qpow = [ONE]
    for _ in range(kdim + ldim + 2):
        qpow.append(qpow[-1] * q)
    wpows = []
    for c, w in enumerate(values):
        size = counts.shape[2 + c]
        col = [ONE]
        for _ in range(size - 1):
            col.append(col[-1] * w)
        wpows.append(col)
    for idx in zip(*np.nonzero(counts)):
        k, ell = int(idx[0]), int(idx[1])
        term = to_rat(int(counts[idx])) * qpow[ell + (k if k_power_of_q else 0)]
        for c in range(len(values)):
            term *= wpows[c][int(idx[2 + c])]
        total += term
    return total


def tutte_graph(g: WeightedGraph, q, max_edges=None) -> Rat:
    """Multivariate Tutte polynomial of a graph at rational q, by exhaustive
    edge-subset enumeration: sum over F of q^kappa(V,F) * prod gamma_e."""
    q = to_rat(q)
    counts, values = class_counts(g, (), max_edges)
    # with no terminals every component is counted in l
    return _fold_counts(counts, values, q, k_power_of_q=False)


def tutte_hypergraph(h: WeightedHypergraph, q, max_edges=None) -> Rat:
    """Multivariate Tutte polynomial of a hypergraph, by enumeration."""
    q = to_rat(q)
    _require_cap(h.m, max_edges, "hypergraph")
    n, m = h.n, h.m
    supports = [tuple(sorted(set(f))) for f in h.hyperedges]

    parent = list(range(n))
    size = [1] * n

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    total = to_rat(0)
    qpow = [ONE]
    for _ in range(n):
        qpow.append(qpow[-1] * q)

    def rec(i, comps, weight):
        nonlocal total
        if i == m:
            total += weight * qpow[comps]
            return
        rec(i + 1, comps, weight)
        undo = []
        for v in supports[i][1:]:
            ru, rv = find(supports[i][0]), find(v)
            if ru != rv:
                if size[ru] < size[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                size[ru] += size[rv]
                undo.append((ru, rv))
                comps -= 1
        rec(i + 1, comps, weight * h.weights[i])
        for ru, rv in reversed(undo):
            parent[rv] = rv
            size[ru] -= size[rv]

    rec(0, n, ONE)
    return total


def potts_mono_histogram(h: WeightedHypergraph, q: int) -> dict[int, int]:
    """Count colourings sigma: V -> [q] by the bitmask of monochromatic
    hyperedges.  Direct enumeration over all q^n colourings."""
    if q < 1 or int(q) != q:
        raise ValueError("Potts needs a positive integer q")
    q = int(q)
    supports = [tuple(sorted(set(f))) for f in h.hyperedges]
    hist: dict[int, int] = {}
    for sigma in itertools.product(range(q), repeat=h.n):
        mask = 0
        for i, f in enumerate(supports):
            c0 = sigma[f[0]]
            if all(sigma[v] == c0 for v in f[1:]):
                mask |= 1 << i
        hist[mask] = hist.get(mask, 0) + 1
    return hist


def potts(h: WeightedHypergraph, q: int, max_edges=None, max_configs=None) -> Rat:
    """Potts partition function: sum over colourings of
    prod_f (1 + gamma_f * [f monochromatic]).  q must be a positive integer."""
    if q < 1 or int(q) != q:
        raise ValueError("Potts needs a positive integer q")
    q = int(q)
    cap = max_configs if max_configs is not None else 1 << enumeration_cap(max_edges)
    if q**h.n > cap:
        raise EnumerationCapError(
            f"instance too large for exact oracle: {q}^{h.n} colourings, cap {cap}"
        )
    _require_cap(h.m, max_edges, "hypergraph")
    hist = potts_mono_histogram(h, q)
    total = to_rat(0)
    for mask, count in hist.items():
        term = to_rat(count)
        i = 0
        mm = mask
        while mm:
            if mm & 1:
                term *= ONE + h.weights[i]
            mm >>= 1
            i += 1
        total += term
    return total


def fk_check(h: WeightedHypergraph, q: int, max_edges=None) -> bool:
    """Exact Fortuin-Kasteleyn equality of the Potts and Tutte forms."""
    return potts(h, q, max_edges) == tutte_hypergraph(h, to_rat(q), max_edges)


@dataclass(frozen=True)
class TerminalSplit:
    z_joined: Rat
    z_split: Rat

    @property
    def total(self) -> Rat:
        return self.z_joined + self.z_split

    def implemented_weight(self, q) -> Rat:
        """q * Z_st / Z_s|t, the effective weight between the terminals."""
        return to_rat(q) * self.z_joined / self.z_split


def terminal_split(g: WeightedGraph, s: int, t: int, q, max_edges=None) -> TerminalSplit:
    """Split the Tutte sum by whether s and t share a component (enumeration)."""
    if s == t:
        raise ValueError("terminals must be distinct")
    q = to_rat(q)
    counts, values = class_counts(g, (s, t), max_edges)
    joined = _fold_counts(counts[1:2], values, q, k_power_of_q=False) * q
    split_counts = counts[2:3]
    split = _fold_counts(split_counts, values, q, k_power_of_q=False) * q * q
    return TerminalSplit(joined, split)


def exact_y_distribution(spec, q, max_edges=None) -> dict[int, Rat]:
    """Law of Y (number of terminal-containing components) under the
    random-cluster measure on the gadget with its terminal boundary joined,
    computed exactly by enumerating the variant gadget's edge subsets."""
    q = to_rat(q)
    g = spec.variant_graph()
    counts, values = class_counts(g, spec.terminal_vertices(), max_edges)
    z = {}
    for k in range(1, spec.t + 1):
        z[k] = _fold_counts(counts[k : k + 1], values, q, k_power_of_q=False)
    total = sum(z.values(), to_rat(0))
    if total == 0:
        raise ValueError("degenerate gadget: zero partition function")
    dist = {k: zk / total for k, zk in z.items()}
    assert sum(dist.values(), to_rat(0)) == 1
    return dist


# -- partition-state sweep ------------------------------------------------------

def partition_sweep(g: WeightedGraph, q, keep=(), max_states=500_000):
    """Exact Tutte evaluation by sweeping edges in input order and tracking
    the component partition of the active frontier.

    Returns {frozenset of frozenset blocks over `keep`: weight}; each weight
    already includes q^c for the c components closed during the sweep.
    Vertices in `keep` are never closed.  Exponential only in the frontier
    size, so fast for chain-like edge orders regardless of edge count.
    """
    q = to_rat(q)
    keep = tuple(int(v) for v in keep)
    n, m = g.n, g.m
    first = [m] * n
    last = [-1] * n
    for i, (u, v) in enumerate(g.edges):
        for x in (u, v):
            first[x] = min(first[x], i)
            last[x] = max(last[x], i)
    keep_set = set(keep)

    # states: {partition (frozenset of frozensets of vertices): weight}
    states: dict = {frozenset(): ONE}
    isolated_q = 0
    for v in range(n):
        if last[v] == -1:  # edgeless vertex
            if v not in keep_set:
                isolated_q += 1

    def introduce(states, v):
        return {part | {frozenset((v,))}: w for part, w in states.items()}

    def merge_blocks(part, u, v):
        bu = bv = None
        for b in part:
            if u in b:
                bu = b
            if v in b:
                bv = b
        if bu is bv:
            return part
        return (part - {bu, bv}) | {bu | bv}

    active: set[int] = set()
    for i, (u, v) in enumerate(g.edges):
        for x in (u, v):
            if first[x] == i:
                states = introduce(states, x)
                active.add(x)
        w_e = g.weights[i]
        nxt: dict = {}
        for part, w in states.items():
            nxt[part] = nxt.get(part, to_rat(0)) + w
            merged = merge_blocks(part, u, v)
            nxt[merged] = nxt.get(merged, to_rat(0)) + w * w_e
        states = nxt
        for x in (u, v):
            if last[x] == i and x not in keep_set:
                nxt = {}
                for part, w in states.items():
                    blk = next(b for b in part if x in b)
                    rest = blk - {x}
                    if rest:
                        part2 = (part - {blk}) | {rest}
                    else:
                        part2 = part - {blk}
                        w = w * q
                    nxt[part2] = nxt.get(part2, to_rat(0)) + w
                states = nxt
                active.discard(x)
        if len(states) > max_states:
            raise EnumerationCapError(
                f"partition sweep exceeded {max_states} states at edge {i}; "
                "reorder edges or use subset enumeration"
            )

    # keep-vertices that never appeared in an edge become singletons
    for v in keep:
        if last[v] == -1:
            states = introduce(states, v)
    qiso = q**isolated_q if isolated_q else ONE
    return {part: w * qiso for part, w in states.items()}


def tutte_graph_sweep(g: WeightedGraph, q, max_states=500_000) -> Rat:
    states = partition_sweep(g, q, keep=(), max_states=max_states)
    (part, w), = states.items()
    assert part == frozenset()
    return w


def terminal_split_sweep(g: WeightedGraph, s: int, t: int, q,
                         max_states=500_000) -> TerminalSplit:
    """Terminal split via the partition sweep; exact and fast on
    series-parallel expansions far beyond the enumeration cap."""
    if s == t:
        raise ValueError("terminals must be distinct")
    q = to_rat(q)
    states = partition_sweep(g, q, keep=(s, t), max_states=max_states)
    joined = split = to_rat(0)
    key_joined = frozenset({frozenset((s, t))})
    key_split = frozenset({frozenset((s,)), frozenset((t,))})
    for part, w in states.items():
        if part == key_joined:
            joined += w * q
        elif part == key_split:
            split += w * q * q
        else:
            raise AssertionError(f"unexpected final partition {part}")
    return TerminalSplit(joined, split)
