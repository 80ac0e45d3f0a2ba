"""Pure-Python kernel implementations.

This module is the reference semantics for the compiled extension in
``_kernels.pyx``: identical inputs (including the seed) must produce
identical outputs from both, which the test suite checks.  The hot loops
here are deliberately simple; use the compiled backend for large runs.
"""

from __future__ import annotations

import numpy as np

from .errors import CouplingViolationError
from .rng import Xoshiro256StarStar

BACKEND_NAME = "python"

_MASK64 = (1 << 64) - 1
_U64 = 1 << 64


# -- exact subset enumeration -------------------------------------------------

def subset_class_counts(n, eu, ev, wclass, n_classes, terminal):
    """Classify all 2^m edge subsets by component structure and edge usage.

    Returns a uint64 array c with shape (T+1, n-T+1, s_0+1, ..., s_{C-1}+1)
    where T is the number of terminal vertices and s_c the number of edges
    in weight class c.  c[k, l, a_0, ...] counts subsets whose components
    split into k containing a terminal and l containing none, using a_c
    edges of class c.
    """
    m = len(eu)
    term = [bool(t) for t in terminal]
    T = sum(term)
    class_sizes = [0] * n_classes
    for c in wclass:
        class_sizes[int(c)] += 1
    shape = (T + 1, n - T + 1) + tuple(s + 1 for s in class_sizes)
    counts = np.zeros(shape, dtype=np.uint64)

    parent = list(range(n))
    size = [1] * n
    tcnt = [1 if term[v] else 0 for v in range(n)]
    state = {"comps": n, "tcomps": T}
    acc = [0] * n_classes

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    def union(u, v):
        ru, rv = find(u), find(v)
        if ru == rv:
            return None
        if size[ru] < size[rv]:
            ru, rv = rv, ru
        parent[rv] = ru
        size[ru] += size[rv]
        before = (1 if tcnt[ru] > 0 else 0) + (1 if tcnt[rv] > 0 else 0)
        tcnt[ru] += tcnt[rv]
        after = 1 if tcnt[ru] > 0 else 0
        state["comps"] -= 1
        state["tcomps"] += after - before
        return (ru, rv, after - before)

    def undo(rec):
        ru, rv, tdelta = rec
        parent[rv] = rv
        size[ru] -= size[rv]
        tcnt[ru] -= tcnt[rv]
        state["comps"] += 1
        state["tcomps"] -= tdelta

    def rec_edges(i):
        if i == m:
            k = state["tcomps"]
            ell = state["comps"] - k
            counts[(k, ell) + tuple(acc)] += 1
            return
        rec_edges(i + 1)
        c = int(wclass[i])
        acc[c] += 1
        r = union(eu[i], ev[i])
        rec_edges(i + 1)
        if r is not None:
            undo(r)
        acc[c] -= 1

    rec_edges(0)
    return counts


def largest_component(n, eu, ev, in_a):
    parent = list(range(n))
    size = [1] * n

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(eu)):
        if in_a[i]:
            ru, rv = find(eu[i]), find(ev[i])
            if ru != rv:
                if size[ru] < size[rv]:
                    ru, rv = rv, ru
                parent[rv] = ru
                size[ru] += size[rv]
    return max(size[find(v)] for v in range(n)) if n else 0


# -- heat-bath chains ----------------------------------------------------------

class _Adj:
    """Dynamic adjacency over the current edge subset."""

    def __init__(self, n, eu, ev, in_a):
        self.eu, self.ev = eu, ev
        self.nbr = [set() for _ in range(n)]
        for i in range(len(eu)):
            if in_a[i]:
                self.add(i)

    def add(self, eid):
        u, v = self.eu[eid], self.ev[eid]
        self.nbr[u].add((v, eid))
        self.nbr[v].add((u, eid))

    def remove(self, eid):
        u, v = self.eu[eid], self.ev[eid]
        self.nbr[u].discard((v, eid))
        self.nbr[v].discard((u, eid))

    def connected_without(self, u, v, skip_eid):
        if u == v:
            return True
        seen = {u}
        stack = [u]
        while stack:
            x = stack.pop()
            for (y, eid) in self.nbr[x]:
                if eid == skip_eid:
                    continue
                if y == v:
                    return True
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return False


def _resolve_pending(pending, rng):
    """Resolve exact Bernoulli tails that share one uniform variate.

    `pending` maps a key to the current fractional threshold; successive
    64-bit blocks of the shared uniform refine every pending comparison at
    once.  A zero tail resolves to False without consuming randomness.
    Returns {key: bool}.
    """
    out = {}
    pending = dict(pending)
    while True:
        for key in list(pending):
            if pending[key] == 0:
                out[key] = False
                del pending[key]
        if not pending:
            return out
        r = rng.next_u64()
        nxt = {}
        for key, frac in pending.items():
            scaled = frac * _U64
            fl = int(scaled.numerator // scaled.denominator)
            if r < fl:
                out[key] = True
            elif r > fl:
                out[key] = False
            else:
                nxt[key] = scaled - fl
        pending = nxt


def _decide(r, thr, frac, rng):
    if r < thr:
        return True
    if r > thr:
        return False
    return _resolve_pending({0: frac}, rng)[0]


def hb_run(n, eu, ev, in_a0, free_edges,
           thr_same, frac_same, thr_diff, frac_diff, needs_conn,
           steps, seed, record_mode=0, rec_a=0, rec_b=0):
    """Run `steps` single-edge heat-bath updates.

    record_mode 0: no records.  1: visit counts over full-subset bitmasks
    (requires m <= 20), rec_a = burn-in steps, rec_b = thinning interval.
    2: largest component size after every rec_a steps.
    Returns (final subset uint8 array, record array or None).
    """
    m = len(eu)
    rng = Xoshiro256StarStar(seed)
    in_a = [bool(x) for x in in_a0]
    adj = _Adj(n, eu, ev, in_a)
    nfree = len(free_edges)

    records = None
    mask = 0
    if record_mode == 1:
        if m > 20:
            raise ValueError("visit recording limited to 20 edges")
        records = np.zeros(1 << m, dtype=np.uint64)
        for i in range(m):
            if in_a[i]:
                mask |= 1 << i
    elif record_mode == 2:
        records = np.zeros(steps // rec_a, dtype=np.int64)

    n_rec = 0
    for step in range(steps):
        if nfree > 0:
            e = free_edges[rng.rand_below(nfree)]
            u, v = eu[e], ev[e]
            if needs_conn:
                conn = adj.connected_without(u, v, e)
            else:
                conn = True
            thr = thr_same[e] if conn else thr_diff[e]
            frac = frac_same[e] if conn else frac_diff[e]
            r = rng.next_u64()
            include = _decide(r, thr, frac, rng)
            if include != in_a[e]:
                in_a[e] = include
                if include:
                    adj.add(e)
                    mask |= 1 << e
                else:
                    adj.remove(e)
                    mask &= ~(1 << e)
        if record_mode == 1 and step >= rec_a and (step - rec_a) % rec_b == 0:
            records[mask] += 1
        elif record_mode == 2 and (step + 1) % rec_a == 0:
            records[n_rec] = largest_component(n, eu, ev, in_a)
            n_rec += 1

    return np.array([1 if x else 0 for x in in_a], dtype=np.uint8), records


def hb_coupled_run(n, eu, ev, in_lo0, in_up0, free_edges,
                   lo_thr_same, lo_frac_same, lo_thr_diff, lo_frac_diff, lo_needs_conn,
                   up_thr_same, up_frac_same, up_thr_diff, up_frac_diff, up_needs_conn,
                   steps, seed):
    """Advance two chains in lockstep with shared randomness.

    Containment lower <= upper is asserted initially and re-checked at every
    step on the resampled edge; a violation raises CouplingViolationError.
    """
    m = len(eu)
    rng = Xoshiro256StarStar(seed)
    in_lo = [bool(x) for x in in_lo0]
    in_up = [bool(x) for x in in_up0]
    for i in range(m):
        if in_lo[i] and not in_up[i]:
            raise CouplingViolationError(f"initial states violate containment at edge {i}")
    adj_lo = _Adj(n, eu, ev, in_lo)
    adj_up = _Adj(n, eu, ev, in_up)
    nfree = len(free_edges)

    for _ in range(steps):
        if nfree == 0:
            break
        e = free_edges[rng.rand_below(nfree)]
        u, v = eu[e], ev[e]
        if lo_needs_conn:
            conn = adj_lo.connected_without(u, v, e)
            thr_lo = lo_thr_same[e] if conn else lo_thr_diff[e]
            frac_lo = lo_frac_same[e] if conn else lo_frac_diff[e]
        else:
            thr_lo, frac_lo = lo_thr_same[e], lo_frac_same[e]
        if up_needs_conn:
            conn = adj_up.connected_without(u, v, e)
            thr_up = up_thr_same[e] if conn else up_thr_diff[e]
            frac_up = up_frac_same[e] if conn else up_frac_diff[e]
        else:
            thr_up, frac_up = up_thr_same[e], up_frac_same[e]

        r = rng.next_u64()
        pending = {}
        inc_lo = inc_up = None
        if r < thr_lo:
            inc_lo = True
        elif r > thr_lo:
            inc_lo = False
        else:
            pending["lo"] = frac_lo
        if r < thr_up:
            inc_up = True
        elif r > thr_up:
            inc_up = False
        else:
            pending["up"] = frac_up
        if pending:
            resolved = _resolve_pending(pending, rng)
            inc_lo = resolved.get("lo", inc_lo)
            inc_up = resolved.get("up", inc_up)

        if inc_lo and not inc_up:
            raise CouplingViolationError(
                f"coupled step would include edge {e} in lower chain only"
            )
        if inc_lo != in_lo[e]:
            in_lo[e] = inc_lo
            (adj_lo.add if inc_lo else adj_lo.remove)(e)
        if inc_up != in_up[e]:
            in_up[e] = inc_up
            (adj_up.add if inc_up else adj_up.remove)(e)

    return (np.array([1 if x else 0 for x in in_lo], dtype=np.uint8),
            np.array([1 if x else 0 for x in in_up], dtype=np.uint8))
