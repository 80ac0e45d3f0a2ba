"""Random-cluster and Erdos-Renyi samplers, monotone couplings, and the
red/green component decomposition.

Chains use single-edge heat-bath dynamics: pick a uniformly random free
edge and resample it from its conditional law (p(e) when the endpoints are
already connected without it, p(e)/(p(e)+q(1-p(e))) otherwise).  All
probabilities are exact rationals; Bernoulli draws compare 64-bit uniform
blocks against rational thresholds, so no floating point enters the
sampling path.  Couplings advance both chains on the same edge with a
shared uniform variate and hard-fail on any containment violation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import mpmath
import numpy as np

from . import backend
from ._kernels_py import _resolve_pending
from .errors import CouplingViolationError
from .graphs import WeightedGraph, connected_components
from .rationals import ONE, ZERO, Rat, bernoulli_threshold, to_rat
from .rng import Xoshiro256StarStar


@dataclass(frozen=True)
class RCModel:
    """Random-cluster model RC(G; q, p)."""

    q: Rat

    def conditional_probs(self, pe: Rat) -> tuple[Rat, Rat]:
        q = self.q
        same = pe
        diff = pe / (pe + q * (ONE - pe)) if pe < 1 else ONE
        return same, diff


@dataclass(frozen=True)
class ERModel:
    """Independent-edge model ER(G; p)."""

    def conditional_probs(self, pe: Rat) -> tuple[Rat, Rat]:
        return pe, pe


def normalize_probs(g: WeightedGraph, p) -> tuple[Rat, ...]:
    """Accept a scalar, sequence, or dict of per-edge probabilities."""
    if isinstance(p, dict):
        vals = [to_rat(p[e]) for e in range(g.m)]
    elif isinstance(p, (list, tuple)):
        vals = [to_rat(x) for x in p]
        if len(vals) != g.m:
            raise ValueError("probability count does not match edge count")
    else:
        vals = [to_rat(p)] * g.m
    for x in vals:
        if x < 0 or x > 1:
            raise ValueError(f"edge probability {x} outside [0,1]")
    return tuple(vals)


def probs_from_weights(g: WeightedGraph) -> tuple[Rat, ...]:
    """p(e) = gamma_e / (1 + gamma_e), inverting gamma = p/(1-p)."""
    return tuple(w / (ONE + w) for w in g.weights)


@dataclass(frozen=True)
class Conditioning:
    forced_in: frozenset[int] = frozenset()
    forced_out: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.forced_in & self.forced_out:
            raise ValueError("forced_in and forced_out overlap")

    def validate(self, g: WeightedGraph, p: tuple[Rat, ...]):
        for e in self.forced_in:
            if not 0 <= e < g.m:
                raise ValueError(f"edge id {e} out of range")
            if p[e] == 0:
                raise ValueError(f"edge {e} forced in but p(e)=0")
        for e in self.forced_out:
            if not 0 <= e < g.m:
                raise ValueError(f"edge id {e} out of range")
            if p[e] == 1:
                raise ValueError(f"edge {e} forced out but p(e)=1")

    def free_edges(self, m: int) -> list[int]:
        return [e for e in range(m) if e not in self.forced_in and e not in self.forced_out]


NO_CONDITIONING = Conditioning()


@dataclass(frozen=True)
class ChainState:
    edges: frozenset[int]
    steps: int = 0

    def check(self, cond: Conditioning):
        if not cond.forced_in <= self.edges:
            raise ValueError("state misses a forced-in edge")
        if self.edges & cond.forced_out:
            raise ValueError("state contains a forced-out edge")


@dataclass(frozen=True)
class CoupledState:
    lower: ChainState
    upper: ChainState

    def __post_init__(self):
        if not self.lower.edges <= self.upper.edges:
            raise CouplingViolationError("lower chain is not contained in upper chain")


# -- exact weights and laws -----------------------------------------------------

def rc_weight(g: WeightedGraph, subset, q, p) -> Rat:
    """Unnormalised RC weight q^kappa * prod_A p(e) * prod_others (1-p(e))."""
    q = to_rat(q)
    p = normalize_probs(g, p)
    ids = set(g.check_subset(subset))
    count, _ = connected_components(g, ids)
    w = q**count
    for e in range(g.m):
        w *= p[e] if e in ids else ONE - p[e]
    return w


def rc_distribution(g: WeightedGraph, q, p, cond: Conditioning = NO_CONDITIONING):
    """Exact normalised law over edge subsets (enumeration; small m only)."""
    q = to_rat(q)
    p = normalize_probs(g, p)
    cond.validate(g, p)
    free = cond.free_edges(g.m)
    base = frozenset(cond.forced_in)
    weights = {}
    for r in range(len(free) + 1):
        for extra in itertools.combinations(free, r):
            sub = base | frozenset(extra)
            w = rc_weight(g, sub, q, p)
            if w != 0:
                weights[sub] = w
    total = sum(weights.values(), ZERO)
    if total == 0:
        raise ValueError("conditioning has probability zero")
    return {sub: w / total for sub, w in weights.items()}


# -- heat-bath dynamics ----------------------------------------------------------

def _threshold_arrays(g: WeightedGraph, model, p):
    thr_same = np.zeros(g.m, dtype=np.uint64)
    thr_diff = np.zeros(g.m, dtype=np.uint64)
    frac_same: list = [ZERO] * g.m
    frac_diff: list = [ZERO] * g.m
    distinct = False
    cache: dict = {}
    for e in range(g.m):
        key = (p[e].numerator, p[e].denominator)
        hit = cache.get(key)
        if hit is None:
            ps, pd = model.conditional_probs(p[e])
            hit = (bernoulli_threshold(ps), bernoulli_threshold(pd), ps != pd)
            cache[key] = hit
        (thr_same[e], frac_same[e]), (thr_diff[e], frac_diff[e]), d = hit
        distinct = distinct or d
    return thr_same, frac_same, thr_diff, frac_diff, distinct


def _edge_arrays(g: WeightedGraph):
    return [e[0] for e in g.edges], [e[1] for e in g.edges]


def heat_bath_step(g: WeightedGraph, state: ChainState, model, p,
                   cond: Conditioning, rng: Xoshiro256StarStar) -> ChainState:
    """One single-edge heat-bath update (pure reference implementation;
    bulk runs go through the compiled kernel with identical semantics)."""
    p = normalize_probs(g, p)
    cond.validate(g, p)
    state.check(cond)
    free = cond.free_edges(g.m)
    if not free:
        return ChainState(state.edges, state.steps + 1)
    e = free[rng.rand_below(len(free))]
    u, v = g.edges[e]
    current = set(state.edges)
    current.discard(e)
    _, part = connected_components(g, current)
    connected = part.block_of(u) is part.block_of(v)
    ps, pd = model.conditional_probs(p[e])
    prob = ps if connected else pd
    include = rng.bernoulli(prob)
    nxt = state.edges | {e} if include else state.edges - {e}
    return ChainState(frozenset(nxt), state.steps + 1)


def run_chain(g: WeightedGraph, model, p, cond: Conditioning, steps: int,
              seed: int, initial=None, record_mode=0, rec_a=0, rec_b=0):
    """Bulk heat-bath run via the active kernel backend.

    record_mode 1 tallies visited subsets (bitmask) every rec_b steps after
    rec_a burn-in; record_mode 2 stores the largest component size every
    rec_a steps.  Returns (final ChainState, record array or None).
    """
    p = normalize_probs(g, p)
    cond.validate(g, p)
    if initial is None:
        initial = frozenset(cond.forced_in)
    init_state = ChainState(frozenset(initial), 0)
    init_state.check(cond)
    eu, ev = _edge_arrays(g)
    in_a0 = [1 if e in init_state.edges else 0 for e in range(g.m)]
    thr_same, frac_same, thr_diff, frac_diff, distinct = _threshold_arrays(g, model, p)
    needs_conn = distinct and isinstance(model, RCModel)
    final, records = backend.hb_run(
        g.n, eu, ev, in_a0, cond.free_edges(g.m),
        thr_same, frac_same, thr_diff, frac_diff, needs_conn,
        int(steps), int(seed), record_mode, rec_a, rec_b,
    )
    edges = frozenset(e for e in range(g.m) if final[e])
    return ChainState(edges, int(steps)), records


def sample_rc(g: WeightedGraph, q, p, cond: Conditioning = NO_CONDITIONING,
              sweeps: int = 1, seed: int = 0) -> frozenset[int]:
    """Heat-bath state after sweeps*m updates from the minimal state A+."""
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    state, _ = run_chain(g, RCModel(to_rat(q)), p, cond, sweeps * g.m, seed)
    return state.edges


def sample_er(g: WeightedGraph, p, cond: Conditioning = NO_CONDITIONING,
              sweeps: int = 1, seed: int = 0) -> frozenset[int]:
    if sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    state, _ = run_chain(g, ERModel(), p, cond, sweeps * g.m, seed)
    return state.edges


# -- monotone couplings -----------------------------------------------------------

COUPLING_KINDS = ("er-over-rc", "rc-over-erq", "rc-monotone-p")


def coupling_legs(kind: str, q, p, p_prime=None):
    """Lower/upper (model, probabilities) pairs for the three couplings.

    er-over-rc:   RC(q,p) below ER(p), q >= 1
    rc-over-erq:  ER(p/q) below RC(q,p), q >= 1
    rc-monotone-p: RC(q,p) below RC(q,p') with p(e) <= p'(e) everywhere
    """
    q = to_rat(q)
    if kind in ("er-over-rc", "rc-over-erq") and q < 1:
        raise ValueError("coupling requires q >= 1")
    if kind == "er-over-rc":
        return (RCModel(q), tuple(p)), (ERModel(), tuple(p))
    if kind == "rc-over-erq":
        return (ERModel(), tuple(x / q for x in p)), (RCModel(q), tuple(p))
    if kind == "rc-monotone-p":
        if p_prime is None:
            raise ValueError("rc-monotone-p needs the larger probability map")
        if any(a > b for a, b in zip(p, p_prime)):
            raise ValueError("rc-monotone-p requires p(e) <= p'(e) for every edge")
        return (RCModel(q), tuple(p)), (RCModel(q), tuple(p_prime))
    raise ValueError(f"unknown coupling kind {kind!r}")


def coupled_step(g: WeightedGraph, cs: CoupledState, kind: str, q, p,
                 cond: Conditioning, rng: Xoshiro256StarStar,
                 p_prime=None) -> CoupledState:
    """Reference single coupled update: same edge, shared uniform variate."""
    p = normalize_probs(g, p)
    pp = normalize_probs(g, p_prime) if p_prime is not None else None
    (lo_model, lo_p), (up_model, up_p) = coupling_legs(kind, q, p, pp)
    cond.validate(g, lo_p)
    cond.validate(g, up_p)
    free = cond.free_edges(g.m)
    if not free:
        return cs
    e = free[rng.rand_below(len(free))]
    u, v = g.edges[e]

    def conditional(state: ChainState, model, probs):
        cur = set(state.edges)
        cur.discard(e)
        _, part = connected_components(g, cur)
        connected = part.block_of(u) is part.block_of(v)
        ps, pd = model.conditional_probs(probs[e])
        return ps if connected else pd

    prob_lo = conditional(cs.lower, lo_model, lo_p)
    prob_up = conditional(cs.upper, up_model, up_p)
    r = rng.next_u64()
    fl_lo, frac_lo = bernoulli_threshold(prob_lo)
    fl_up, frac_up = bernoulli_threshold(prob_up)
    pending = {}
    inc_lo = inc_up = None
    if r < fl_lo:
        inc_lo = True
    elif r > fl_lo:
        inc_lo = False
    else:
        pending["lo"] = frac_lo
    if r < fl_up:
        inc_up = True
    elif r > fl_up:
        inc_up = False
    else:
        pending["up"] = frac_up
    if pending:
        resolved = _resolve_pending(pending, rng)
        inc_lo = resolved.get("lo", inc_lo)
        inc_up = resolved.get("up", inc_up)
    if inc_lo and not inc_up:
        raise CouplingViolationError(f"edge {e} would enter the lower chain only")
    lower = ChainState(cs.lower.edges | {e} if inc_lo else cs.lower.edges - {e},
                       cs.lower.steps + 1)
    upper = ChainState(cs.upper.edges | {e} if inc_up else cs.upper.edges - {e},
                       cs.upper.steps + 1)
    return CoupledState(lower, upper)


def run_coupled(g: WeightedGraph, kind: str, q, p, cond: Conditioning,
                steps: int, seed: int, p_prime=None,
                initial_lower=None, initial_upper=None):
    """Bulk coupled run via the kernel; raises CouplingViolationError on any
    containment break (the executable content of the domination lemmas)."""
    p = normalize_probs(g, p)
    pp = normalize_probs(g, p_prime) if p_prime is not None else None
    (lo_model, lo_p), (up_model, up_p) = coupling_legs(kind, q, p, pp)
    cond.validate(g, lo_p)
    cond.validate(g, up_p)
    base = frozenset(cond.forced_in)
    lo0 = base if initial_lower is None else frozenset(initial_lower)
    up0 = base if initial_upper is None else frozenset(initial_upper)
    CoupledState(ChainState(lo0), ChainState(up0))  # containment check
    eu, ev = _edge_arrays(g)
    lo_ts, lo_fs, lo_td, lo_fd, lo_distinct = _threshold_arrays(g, lo_model, lo_p)
    up_ts, up_fs, up_td, up_fd, up_distinct = _threshold_arrays(g, up_model, up_p)
    lo_final, up_final = backend.hb_coupled_run(
        g.n, eu, ev,
        [1 if e in lo0 else 0 for e in range(g.m)],
        [1 if e in up0 else 0 for e in range(g.m)],
        cond.free_edges(g.m),
        lo_ts, lo_fs, lo_td, lo_fd, lo_distinct and isinstance(lo_model, RCModel),
        up_ts, up_fs, up_td, up_fd, up_distinct and isinstance(up_model, RCModel),
        int(steps), int(seed),
    )
    lower = ChainState(frozenset(e for e in range(g.m) if lo_final[e]), int(steps))
    upper = ChainState(frozenset(e for e in range(g.m) if up_final[e]), int(steps))
    return CoupledState(lower, upper)


# -- red/green decomposition -------------------------------------------------------

def red_green_split(g: WeightedGraph, subset, r, rng: Xoshiro256StarStar):
    """Colour each component of (V, subset) red with probability r.

    Returns (red vertex set, red edge ids, green edge ids)."""
    r = to_rat(r)
    if r < 0 or r > 1:
        raise ValueError("r outside [0,1]")
    ids = set(g.check_subset(subset))
    _, part = connected_components(g, ids)
    red_vertices: set[int] = set()
    for block in part.blocks:
        if rng.bernoulli(r):
            red_vertices.update(block)
    red_edges = frozenset(e for e in ids if g.edges[e][0] in red_vertices)
    green_edges = frozenset(ids) - red_edges
    return frozenset(red_vertices), red_edges, green_edges


def induced_subgraph(g: WeightedGraph, vertices):
    """Subgraph on a vertex subset, relabelled 0..k-1 in sorted order.
    Returns (subgraph, original edge ids in the subgraph's edge order)."""
    verts = sorted(set(int(v) for v in vertices))
    pos = {v: i for i, v in enumerate(verts)}
    edges, weights, ids = [], [], []
    for e, (u, v) in enumerate(g.edges):
        if u in pos and v in pos:
            edges.append((pos[u], pos[v]))
            weights.append(g.weights[e])
            ids.append(e)
    return WeightedGraph.build(len(verts), edges, weights), ids


def fundamental_lemma_check(g: WeightedGraph, q, p, r, max_edges: int = 12):
    """Exact verification of the red/green decomposition law.

    Enumerates the joint space of (edge subset, component colouring) and
    checks, for every achievable red vertex set V1: conditioned on R = V1,
    the red subgraph follows RC(G[V1]; r*q, p), the green subgraph follows
    RC(G[V\\V1]; (1-r)*q, p), and the two are independent.  Returns the
    number of (V1, subset) pairs checked; raises AssertionError on any
    mismatch.
    """
    q, r = to_rat(q), to_rat(r)
    p = normalize_probs(g, p)
    if g.m > max_edges:
        raise ValueError("fundamental lemma check is enumeration only")
    joint: dict[frozenset, dict[tuple, Rat]] = {}
    for size in range(g.m + 1):
        for sub in itertools.combinations(range(g.m), size):
            sub = frozenset(sub)
            w = rc_weight(g, sub, q, p)
            _, part = connected_components(g, sub)
            blocks = part.blocks
            for colours in itertools.product((False, True), repeat=len(blocks)):
                pr = w
                red_vs: set[int] = set()
                for blk, is_red in zip(blocks, colours):
                    pr *= r if is_red else ONE - r
                    if is_red:
                        red_vs.update(blk)
                if pr == 0:
                    continue
                v1 = frozenset(red_vs)
                red_e = frozenset(e for e in sub if g.edges[e][0] in red_vs)
                green_e = sub - red_e
                bucket = joint.setdefault(v1, {})
                key = (red_e, green_e)
                bucket[key] = bucket.get(key, ZERO) + pr

    checked = 0
    for v1, bucket in joint.items():
        total = sum(bucket.values(), ZERO)
        red_marg: dict[frozenset, Rat] = {}
        green_marg: dict[frozenset, Rat] = {}
        for (re_, ge_), pr in bucket.items():
            red_marg[re_] = red_marg.get(re_, ZERO) + pr
            green_marg[ge_] = green_marg.get(ge_, ZERO) + pr

        sub_red, red_ids = induced_subgraph(g, v1)
        law_red = rc_distribution(sub_red, r * q, [p[e] for e in red_ids])
        back_red = {frozenset(red_ids[i] for i in s): w for s, w in law_red.items()}
        for s, w in back_red.items():
            assert red_marg.get(s, ZERO) / total == w, (v1, s)
        assert len(back_red) == len(red_marg)

        rest = set(range(g.n)) - v1
        sub_green, green_ids = induced_subgraph(g, rest)
        law_green = rc_distribution(sub_green, (ONE - r) * q, [p[e] for e in green_ids])
        back_green = {frozenset(green_ids[i] for i in s): w for s, w in law_green.items()}
        for s, w in back_green.items():
            assert green_marg.get(s, ZERO) / total == w, (v1, s)
        assert len(back_green) == len(green_marg)

        for (re_, ge_), pr in bucket.items():
            assert pr / total == (red_marg[re_] / total) * (green_marg[ge_] / total)
            checked += 1
    return checked


# -- yellow/blue bounds --------------------------------------------------------------

def bicolour_bounds(nu: int, s: int, nu_max: int, pi_hat) -> tuple:
    """Upper bounds on the no-bicoloured-block and some-bicoloured-block
    probabilities for two independent Bernoulli colourings of [nu] split
    into s blocks of size at most nu_max.

    Returns mpmath floats: ((1-pi)^(nu/s) * (2-(1-pi)^(nu/s)))^s and
    nu * (1-(1-pi)^nu_max)^2.
    """
    if s < 1 or nu < s or nu_max > nu or nu_max < 1:
        raise ValueError("need s >= 1, nu >= s, 1 <= nu_max <= nu")
    pi_hat = to_rat(pi_hat)
    if pi_hat < 0 or pi_hat > 1:
        raise ValueError("pi_hat outside [0,1]")
    with mpmath.workprec(128):
        one_minus = mpmath.mpf(1) - mpmath.mpf(pi_hat.numerator) / mpmath.mpf(pi_hat.denominator)
        u = one_minus ** (mpmath.mpf(nu) / s)
        no_bi = (u * (2 - u)) ** s
        some_bi = nu * (1 - one_minus**nu_max) ** 2
        return no_bi, some_bi


def bicolour_event_mc(block_sizes, pi_hat, trials: int, seed: int):
    """Monte Carlo frequencies of (no bicoloured block, some bicoloured
    block) under the two independent colouring processes."""
    pi_hat = to_rat(pi_hat)
    rng = Xoshiro256StarStar(seed)
    none_ct = some_ct = 0
    for _ in range(trials):
        bic = False
        for size in block_sizes:
            yellow = any(rng.bernoulli(pi_hat) for _ in range(size))
            blue = any(rng.bernoulli(pi_hat) for _ in range(size))
            if yellow and blue:
                bic = True
        if bic:
            some_ct += 1
        else:
            none_ct += 1
    return none_ct / trials, some_ct / trials
