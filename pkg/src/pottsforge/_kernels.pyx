# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: exact subset enumeration and heat-bath chain loops.

Bit-for-bit equivalent to the pure-Python twin in _kernels_py; the test
suite enforces the equivalence.  Exact-Bernoulli boundary refinements (hit
with probability 2^-64 per draw) drop to Python-object arithmetic.
"""

import numpy as np

from .errors import CouplingViolationError

BACKEND_NAME = "cython"

ctypedef unsigned long long u64
ctypedef long long i64

cdef u64 _MASK64 = <u64>0xFFFFFFFFFFFFFFFF
_U64_OBJ = 1 << 64


# -- xoshiro256** --------------------------------------------------------------

cdef struct RngState:
    u64 s0
    u64 s1
    u64 s2
    u64 s3


cdef inline u64 _rotl(u64 x, int k):
    return (x << k) | (x >> (64 - k))


cdef void _seed_rng(RngState* st, u64 seed):
    cdef u64 x = seed
    cdef u64 z
    cdef u64 out[4]
    cdef int i
    for i in range(4):
        x = x + <u64>0x9E3779B97F4A7C15
        z = x
        z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EB
        out[i] = z ^ (z >> 31)
    if out[0] == 0 and out[1] == 0 and out[2] == 0 and out[3] == 0:
        out[0] = 1
    st.s0, st.s1, st.s2, st.s3 = out[0], out[1], out[2], out[3]


cdef inline u64 _next_u64(RngState* st):
    cdef u64 result = _rotl(st.s1 * 5, 7) * 9
    cdef u64 t = st.s1 << 17
    st.s2 ^= st.s0
    st.s3 ^= st.s1
    st.s1 ^= st.s2
    st.s0 ^= st.s3
    st.s2 ^= t
    st.s3 = _rotl(st.s3, 45)
    return result


cdef u64 _rand_below(RngState* st, u64 n):
    cdef u64 rem = ((_MASK64 % n) + 1) % n
    cdef u64 limit = (<u64>0) - rem
    cdef u64 r = _next_u64(st)
    if rem == 0:
        return r % n
    while r >= limit:
        r = _next_u64(st)
    return r % n


# -- exact subset enumeration ---------------------------------------------------

cdef class _Enum:
    cdef int m, n, n_classes
    cdef int[::1] eu, ev, wclass
    cdef int[::1] parent, size, tcnt, acc
    cdef long comps, tcomps
    cdef u64[::1] counts
    cdef long stride_k, stride_l
    cdef long[::1] stride_c

    cdef int _find(self, int x):
        while self.parent[x] != x:
            x = self.parent[x]
        return x

    cdef void _rec(self, int i):
        cdef int c, ru, rv, tdelta
        cdef long idx, j
        if i == self.m:
            idx = self.tcomps * self.stride_k + (self.comps - self.tcomps) * self.stride_l
            for j in range(self.n_classes):
                idx += self.acc[j] * self.stride_c[j]
            self.counts[idx] += 1
            return
        self._rec(i + 1)
        c = self.wclass[i]
        self.acc[c] += 1
        ru = self._find(self.eu[i])
        rv = self._find(self.ev[i])
        if ru == rv:
            self._rec(i + 1)
        else:
            if self.size[ru] < self.size[rv]:
                ru, rv = rv, ru
            self.parent[rv] = ru
            self.size[ru] += self.size[rv]
            tdelta = (1 if self.tcnt[ru] + self.tcnt[rv] > 0 else 0) \
                - (1 if self.tcnt[ru] > 0 else 0) - (1 if self.tcnt[rv] > 0 else 0)
            self.tcnt[ru] += self.tcnt[rv]
            self.comps -= 1
            self.tcomps += tdelta
            self._rec(i + 1)
            self.parent[rv] = rv
            self.size[ru] -= self.size[rv]
            self.tcnt[ru] -= self.tcnt[rv]
            self.comps += 1
            self.tcomps -= tdelta
        self.acc[c] -= 1


def subset_class_counts(n, eu, ev, wclass, n_classes, terminal):
    """Compiled twin of _kernels_py.subset_class_counts."""
    cdef int m = len(eu)
    term = [bool(t) for t in terminal]
    cdef int T = sum(term)
    class_sizes = [0] * int(n_classes)
    for c in wclass:
        class_sizes[int(c)] += 1
    shape = (T + 1, int(n) - T + 1) + tuple(s + 1 for s in class_sizes)

    cdef _Enum st = _Enum()
    st.m = m
    st.n = int(n)
    st.n_classes = int(n_classes)
    st.eu = np.ascontiguousarray(eu, dtype=np.intc)
    st.ev = np.ascontiguousarray(ev, dtype=np.intc)
    st.wclass = np.ascontiguousarray(wclass, dtype=np.intc)
    st.parent = np.arange(st.n, dtype=np.intc)
    st.size = np.ones(st.n, dtype=np.intc)
    st.tcnt = np.array([1 if term[v] else 0 for v in range(st.n)], dtype=np.intc)
    st.acc = np.zeros(st.n_classes, dtype=np.intc)
    st.comps = st.n
    st.tcomps = T

    strides = [0] * st.n_classes
    cur = 1
    for ci in reversed(range(st.n_classes)):
        strides[ci] = cur
        cur *= class_sizes[ci] + 1
    stride_l = cur
    stride_k = cur * (int(n) - T + 1)
    total = stride_k * (T + 1)

    counts = np.zeros(total, dtype=np.uint64)
    st.counts = counts
    st.stride_k = stride_k
    st.stride_l = stride_l
    st.stride_c = np.array(strides, dtype=np.int_)

    st._rec(0)
    return counts.reshape(shape)


# -- heat-bath chains -----------------------------------------------------------

cdef class _Chain:
    """One chain's dynamic state: subset membership plus adjacency lists."""
    cdef int n, m
    cdef int[::1] eu, ev
    cdef unsigned char[::1] in_a
    cdef int[::1] adj_start, adj_len, adj_data
    cdef int[::1] pos_u, pos_v
    # bidirectional BFS scratch
    cdef long[::1] stamp_a, stamp_b
    cdef int[::1] queue_a, queue_b
    cdef long stamp

    def __init__(self, int n, eu, ev, in_a0):
        cdef int i, u, v
        self.n = n
        self.eu = np.ascontiguousarray(eu, dtype=np.intc)
        self.ev = np.ascontiguousarray(ev, dtype=np.intc)
        self.m = self.eu.shape[0]
        self.in_a = np.zeros(self.m, dtype=np.uint8)
        deg = np.zeros(n + 1, dtype=np.intc)
        for i in range(self.m):
            deg[self.eu[i] + 1] += 1
            deg[self.ev[i] + 1] += 1
        self.adj_start = np.cumsum(deg, dtype=np.intc)[:n + 1].astype(np.intc)
        self.adj_len = np.zeros(n, dtype=np.intc)
        self.adj_data = np.zeros(max(1, 2 * self.m), dtype=np.intc)
        self.pos_u = np.zeros(max(1, self.m), dtype=np.intc)
        self.pos_v = np.zeros(max(1, self.m), dtype=np.intc)
        self.stamp_a = np.zeros(n, dtype=np.int_)
        self.stamp_b = np.zeros(n, dtype=np.int_)
        self.queue_a = np.zeros(max(1, n), dtype=np.intc)
        self.queue_b = np.zeros(max(1, n), dtype=np.intc)
        self.stamp = 0
        for i in range(self.m):
            if in_a0[i]:
                self.in_a[i] = 1
                self._adj_add(i)

    cdef void _adj_add(self, int eid):
        cdef int u = self.eu[eid], v = self.ev[eid]
        self.pos_u[eid] = self.adj_len[u]
        self.adj_data[self.adj_start[u] + self.adj_len[u]] = eid
        self.adj_len[u] += 1
        self.pos_v[eid] = self.adj_len[v]
        self.adj_data[self.adj_start[v] + self.adj_len[v]] = eid
        self.adj_len[v] += 1

    cdef void _adj_remove_side(self, int eid, int vert, int slot):
        cdef int last = self.adj_len[vert] - 1
        cdef int moved = self.adj_data[self.adj_start[vert] + last]
        self.adj_data[self.adj_start[vert] + slot] = moved
        if self.eu[moved] == vert:
            self.pos_u[moved] = slot
        else:
            self.pos_v[moved] = slot
        self.adj_len[vert] = last

    cdef void _adj_remove(self, int eid):
        self._adj_remove_side(eid, self.eu[eid], self.pos_u[eid])
        self._adj_remove_side(eid, self.ev[eid], self.pos_v[eid])

    cdef bint connected_without(self, int src, int dst, int skip_eid):
        """Bidirectional BFS over current adjacency, ignoring skip_eid."""
        cdef int ha = 0, ta = 0, hb = 0, tb = 0
        cdef int x, y, g, slot
        if src == dst:
            return 1
        self.stamp += 1
        self.stamp_a[src] = self.stamp
        self.stamp_b[dst] = self.stamp
        self.queue_a[ta] = src; ta += 1
        self.queue_b[tb] = dst; tb += 1
        while ha < ta and hb < tb:
            if ta - ha <= tb - hb:
                x = self.queue_a[ha]; ha += 1
                for slot in range(self.adj_len[x]):
                    g = self.adj_data[self.adj_start[x] + slot]
                    if g == skip_eid:
                        continue
                    y = self.ev[g] if self.eu[g] == x else self.eu[g]
                    if self.stamp_b[y] == self.stamp:
                        return 1
                    if self.stamp_a[y] != self.stamp:
                        self.stamp_a[y] = self.stamp
                        self.queue_a[ta] = y; ta += 1
            else:
                x = self.queue_b[hb]; hb += 1
                for slot in range(self.adj_len[x]):
                    g = self.adj_data[self.adj_start[x] + slot]
                    if g == skip_eid:
                        continue
                    y = self.ev[g] if self.eu[g] == x else self.eu[g]
                    if self.stamp_a[y] == self.stamp:
                        return 1
                    if self.stamp_b[y] != self.stamp:
                        self.stamp_b[y] = self.stamp
                        self.queue_b[tb] = y; tb += 1
        return 0

    cdef void set_edge(self, int eid, bint want):
        if want and not self.in_a[eid]:
            self.in_a[eid] = 1
            self._adj_add(eid)
        elif (not want) and self.in_a[eid]:
            self.in_a[eid] = 0
            self._adj_remove(eid)


cdef bint _refine(RngState* rng, object frac):
    """Exact-Bernoulli tail for a single comparison (cold path)."""
    cdef object scaled, fl
    cdef u64 r
    while True:
        if frac == 0:
            return 0
        scaled = frac * _U64_OBJ
        fl = scaled.numerator // scaled.denominator
        r = _next_u64(rng)
        if r < fl:
            return 1
        if r > fl:
            return 0
        frac = scaled - fl


cdef int _largest_component(_Chain ch):
    # BFS flood fill over current adjacency; reuses the stamp_a scratch.
    cdef int best = 0, cur, v, x, y, g, slot, ha, ta
    if ch.n == 0:
        return 0
    ch.stamp += 1
    for v in range(ch.n):
        if ch.stamp_a[v] == ch.stamp:
            continue
        cur = 1
        ch.stamp_a[v] = ch.stamp
        ch.queue_a[0] = v
        ha = 0; ta = 1
        while ha < ta:
            x = ch.queue_a[ha]; ha += 1
            for slot in range(ch.adj_len[x]):
                g = ch.adj_data[ch.adj_start[x] + slot]
                y = ch.ev[g] if ch.eu[g] == x else ch.eu[g]
                if ch.stamp_a[y] != ch.stamp:
                    ch.stamp_a[y] = ch.stamp
                    ch.queue_a[ta] = y; ta += 1
                    cur += 1
        if cur > best:
            best = cur
    return best


def largest_component(n, eu, ev, in_a):
    cdef _Chain ch = _Chain(int(n), eu, ev, in_a)
    return _largest_component(ch)


def hb_run(n, eu, ev, in_a0, free_edges,
           thr_same, frac_same, thr_diff, frac_diff, needs_conn,
           steps, seed, record_mode=0, rec_a=0, rec_b=0):
    """Compiled twin of _kernels_py.hb_run."""
    cdef _Chain ch = _Chain(int(n), eu, ev, in_a0)
    cdef int m = ch.m
    cdef int[::1] free = np.ascontiguousarray(free_edges, dtype=np.intc)
    cdef u64[::1] tsame = np.ascontiguousarray(thr_same, dtype=np.uint64)
    cdef u64[::1] tdiff = np.ascontiguousarray(thr_diff, dtype=np.uint64)
    cdef bint conn_needed = bool(needs_conn)
    cdef i64 nsteps = int(steps)
    cdef RngState rng
    _seed_rng(&rng, <u64>int(seed))

    cdef int rmode = int(record_mode)
    cdef i64 burnin = int(rec_a), thin = int(rec_b)
    cdef u64[::1] visits = None
    cdef i64[::1] largest = None
    records = None
    cdef u64 mask = 0
    cdef int i
    if rmode == 1:
        if m > 20:
            raise ValueError("visit recording limited to 20 edges")
        records = np.zeros(1 << m, dtype=np.uint64)
        visits = records
        for i in range(m):
            if ch.in_a[i]:
                mask |= (<u64>1) << i
    elif rmode == 2:
        records = np.zeros(int(steps) // int(rec_a), dtype=np.int64)
        largest = records

    cdef i64 step, n_rec = 0
    cdef int nfree = free.shape[0]
    cdef int e, u, v
    cdef bint conn, want
    cdef u64 thr, r

    for step in range(nsteps):
        if nfree > 0:
            e = free[_rand_below(&rng, <u64>nfree)]
            u = ch.eu[e]; v = ch.ev[e]
            if conn_needed:
                conn = ch.connected_without(u, v, e)
            else:
                conn = 1
            thr = tsame[e] if conn else tdiff[e]
            r = _next_u64(&rng)
            if r < thr:
                want = 1
            elif r > thr:
                want = 0
            else:
                want = _refine(&rng, frac_same[e] if conn else frac_diff[e])
            if want != ch.in_a[e]:
                ch.set_edge(e, want)
                if rmode == 1:
                    if want:
                        mask |= (<u64>1) << e
                    else:
                        mask &= ~((<u64>1) << e)
        if rmode == 1 and step >= burnin and (step - burnin) % thin == 0:
            visits[mask] += 1
        elif rmode == 2 and (step + 1) % burnin == 0:
            largest[n_rec] = _largest_component(ch)
            n_rec += 1

    return np.asarray(ch.in_a).copy(), records


def hb_coupled_run(n, eu, ev, in_lo0, in_up0, free_edges,
                   lo_thr_same, lo_frac_same, lo_thr_diff, lo_frac_diff, lo_needs_conn,
                   up_thr_same, up_frac_same, up_thr_diff, up_frac_diff, up_needs_conn,
                   steps, seed):
    """Compiled twin of _kernels_py.hb_coupled_run."""
    cdef _Chain lo = _Chain(int(n), eu, ev, in_lo0)
    cdef _Chain up = _Chain(int(n), eu, ev, in_up0)
    cdef int m = lo.m
    cdef int i
    for i in range(m):
        if lo.in_a[i] and not up.in_a[i]:
            raise CouplingViolationError(
                f"initial states violate containment at edge {i}")
    cdef int[::1] free = np.ascontiguousarray(free_edges, dtype=np.intc)
    cdef u64[::1] lo_ts = np.ascontiguousarray(lo_thr_same, dtype=np.uint64)
    cdef u64[::1] lo_td = np.ascontiguousarray(lo_thr_diff, dtype=np.uint64)
    cdef u64[::1] up_ts = np.ascontiguousarray(up_thr_same, dtype=np.uint64)
    cdef u64[::1] up_td = np.ascontiguousarray(up_thr_diff, dtype=np.uint64)
    cdef bint lo_conn = bool(lo_needs_conn), up_conn = bool(up_needs_conn)
    cdef i64 nsteps = int(steps)
    cdef RngState rng
    _seed_rng(&rng, <u64>int(seed))

    cdef int nfree = free.shape[0]
    cdef i64 step
    cdef int e, u, v
    cdef bint conn, inc_lo, inc_up, lo_pend, up_pend
    cdef u64 thr_lo, thr_up, r
    cdef object frac_lo, frac_up, scaled, fl

    if nfree > 0:
        for step in range(nsteps):
            e = free[_rand_below(&rng, <u64>nfree)]
            u = lo.eu[e]; v = lo.ev[e]
            if lo_conn:
                conn = lo.connected_without(u, v, e)
            else:
                conn = 1
            thr_lo = lo_ts[e] if conn else lo_td[e]
            frac_lo = lo_frac_same[e] if conn else lo_frac_diff[e]
            if up_conn:
                conn = up.connected_without(u, v, e)
            else:
                conn = 1
            thr_up = up_ts[e] if conn else up_td[e]
            frac_up = up_frac_same[e] if conn else up_frac_diff[e]

            r = _next_u64(&rng)
            inc_lo = 0; inc_up = 0
            lo_pend = 0; up_pend = 0
            if r < thr_lo:
                inc_lo = 1
            elif r == thr_lo:
                lo_pend = 1
            if r < thr_up:
                inc_up = 1
            elif r == thr_up:
                up_pend = 1
            if lo_pend or up_pend:
                # shared-uniform refinement, cold path; zero tails resolve
                # to False before any further draw (matches _kernels_py)
                while True:
                    if lo_pend and frac_lo == 0:
                        inc_lo = 0; lo_pend = 0
                    if up_pend and frac_up == 0:
                        inc_up = 0; up_pend = 0
                    if not (lo_pend or up_pend):
                        break
                    r = _next_u64(&rng)
                    if lo_pend:
                        scaled = frac_lo * _U64_OBJ
                        fl = scaled.numerator // scaled.denominator
                        if r < fl:
                            inc_lo = 1; lo_pend = 0
                        elif r > fl:
                            inc_lo = 0; lo_pend = 0
                        else:
                            frac_lo = scaled - fl
                    if up_pend:
                        scaled = frac_up * _U64_OBJ
                        fl = scaled.numerator // scaled.denominator
                        if r < fl:
                            inc_up = 1; up_pend = 0
                        elif r > fl:
                            inc_up = 0; up_pend = 0
                        else:
                            frac_up = scaled - fl

            if inc_lo and not inc_up:
                raise CouplingViolationError(
                    f"coupled step would include edge {e} in lower chain only")
            lo.set_edge(e, inc_lo)
            up.set_edge(e, inc_up)

    return np.asarray(lo.in_a).copy(), np.asarray(up.in_a).copy()
