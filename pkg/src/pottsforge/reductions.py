"""Approximation-preserving reduction pipeline.

Stages, in pipeline order (each trace records how the stage input's value
is recovered from the stage output's value):

1. max-IS extraction: s-fold blow-up of a bipartite graph, after which the
   weighted independent-set sum determines the number of maximum
   independent sets by division and rounding.
2. right-degree padding: attach complete-bipartite widgets until every
   right vertex has the same degree.
3. apex construction: a semiregular bipartite graph becomes a uniform
   hypergraph over the left side plus one apex vertex, with
   Z_IS(B; mu) = (mu+1)^{-1} Z_Tutte(H; mu+1, mu) exactly.
4. hyperedge simulation: each t-ary hyperedge becomes a tuned two-clique
   gadget, leaving a graph with two edge weights.
5. weight implementation: series/parallel expansions replace both weights
   by networks of a single uniform weight.

The final section holds the 3-uniform Ising reduction, which goes the
other way (hypergraph to graph at q = 2, exactly).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import NoCrossingError
from .gadget import (
    GadgetSpec,
    fourth_root,
    tune_rho,
    zeta_evaluator,
)
from .graphs import (
    BipartiteGraph,
    Partition,
    WeightedGraph,
    WeightedHypergraph,
    partition_join,
)
from .rationals import ONE, ZERO, Rat, exp_bounds, rat_floor, sqrt_rat_exact, to_rat


# -- brute-force independent-set oracles (desk scale) ------------------------------

def z_is(b: BipartiteGraph, mu) -> Rat:
    """Weighted independent-set sum of a bipartite graph, enumerating over
    the smaller side: sum_S mu^|S| (1+mu)^(other - |N(S)|)."""
    mu = to_rat(mu)
    if b.left <= b.right:
        k, other = b.left, b.right
        nbr = [0] * k
        for (u, v) in b.edges:
            nbr[u] |= 1 << v
    else:
        k, other = b.right, b.left
        nbr = [0] * k
        for (u, v) in b.edges:
            nbr[v] |= 1 << u
    if k > 24:
        raise ValueError("independent-set oracle is enumeration only")
    mu_pow = [ONE]
    for _ in range(k):
        mu_pow.append(mu_pow[-1] * mu)
    om_pow = [ONE]
    for _ in range(other):
        om_pow.append(om_pow[-1] * (ONE + mu))
    total = ZERO

    def rec(i, size, union):
        nonlocal total
        if i == k:
            total += mu_pow[size] * om_pow[other - bin(union).count("1")]
            return
        rec(i + 1, size, union)
        rec(i + 1, size + 1, union | nbr[i])

    rec(0, 0, 0)
    return total


def max_is(b: BipartiteGraph) -> tuple[int, int]:
    """(maximum independent-set size, number of maximum independent sets),
    by the same smaller-side enumeration."""
    if b.left <= b.right:
        k, other = b.left, b.right
        nbr = [0] * k
        for (u, v) in b.edges:
            nbr[u] |= 1 << v
    else:
        k, other = b.right, b.left
        nbr = [0] * k
        for (u, v) in b.edges:
            nbr[v] |= 1 << u
    if k > 24:
        raise ValueError("independent-set oracle is enumeration only")
    best = -1
    count = 0

    def rec(i, size, union):
        nonlocal best, count
        if i == k:
            total = size + other - bin(union).count("1")
            if total > best:
                best, count = total, 1
            elif total == best:
                count += 1
            return
        rec(i + 1, size, union)
        rec(i + 1, size + 1, union | nbr[i])

    rec(0, 0, 0)
    return best, count


# -- reduction traces ----------------------------------------------------------------

@dataclass
class ReductionTrace:
    """One pipeline stage: value(input) = scale * value(output), exactly or
    within the stage's recorded error bound."""

    stage: str
    instance: object
    scale: Rat
    eps_used: Rat
    warnings: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.scale <= 0:
            raise ValueError("scale factor must be positive")


# -- stage 1: maximum-IS extraction by blow-up ------------------------------------------

@dataclass(frozen=True)
class MaxISBlowup:
    graph: BipartiteGraph
    s: int
    mu_hat: Rat
    xi: int
    divisor: Rat

    def recover_count(self, z_blowup: Rat) -> int:
        """Floor of z / ((1+mu)^s - 1)^xi; exact input gives the exact
        number of maximum independent sets."""
        return rat_floor(to_rat(z_blowup) / self.divisor)


def _min_power_at_least(base: Rat, target: Rat) -> int:
    """Smallest integer k >= 0 with base^k >= target (base > 1)."""
    if base <= 1:
        raise ValueError("base must exceed 1")
    k, acc = 0, ONE
    while acc < target:
        acc *= base
        k += 1
    return k


def maxis_blowup(b: BipartiteGraph, mu, eps) -> tuple[MaxISBlowup, ReductionTrace]:
    """s-fold blow-up: vertex (x, i) for i in [s]; edges between all copies
    of adjacent pairs.  A maximum independent set of size xi contributes
    ((1+mu)^s - 1)^xi to the blow-up's independent-set sum, and s is large
    enough that everything else totals under 1/4 of that."""
    mu, eps = to_rat(mu), to_rat(eps)
    if mu <= 0 or eps <= 0:
        raise ValueError("need mu > 0 and eps > 0")
    n = b.left + b.right
    if n == 0:
        raise ValueError("degenerate bipartite instance (no vertices)")
    # smallest X with (1 + 2mu/3)^X >= 2^(n+3); mu is already rational so
    # the rough estimate mu~ of the construction is mu itself
    s = _min_power_at_least(ONE + 2 * mu / 3, to_rat(2) ** (n + 3))
    s = max(s, 1)
    edges = []
    for (u, v) in b.sorted_edges():
        for i in range(s):
            for j in range(s):
                edges.append((u * s + i, v * s + j))
    blown = BipartiteGraph.build(b.left * s, b.right * s, edges)
    xi, _ = max_is(b)
    divisor = ((ONE + mu) ** s - 1) ** xi
    result = MaxISBlowup(graph=blown, s=s, mu_hat=mu, xi=xi, divisor=divisor)
    trace = ReductionTrace(
        stage="maxis-blowup",
        instance=blown,
        scale=ONE,
        eps_used=eps,
        data={"s": s, "xi": xi, "divisor": divisor},
    )
    return result, trace


# -- stage 2: right-degree padding ---------------------------------------------------------

def pad_profile(d: int, s: int, x: Rat) -> dict:
    """The four functionals of the padding widget K_{d,s} at weight x."""
    x = to_rat(x)
    D = (ONE + x) ** (d - 1)
    U = x * D
    L = (ONE + x) ** s
    Y = L + D - 1
    return {"D": D, "U": U, "L": L, "Y": Y}


@dataclass(frozen=True)
class PadParams:
    s_pad: int
    d: int
    g: int
    mu_lo: Rat
    mu_hi: Rat
    y_value: Rat
    z_psi: Rat

    @property
    def y_power(self) -> Rat:
        return self.y_value**self.g

    @property
    def z_psi_power(self) -> Rat:
        return self.z_psi**self.g


def semiregular_pad(b: BipartiteGraph, mu, eps) -> tuple[BipartiteGraph, PadParams, ReductionTrace]:
    """Attach d - deg(v) copies of the complete bipartite widget K_{d, s}
    to each right vertex v (via the widget's first left vertex), making
    every right degree equal to d.  The padded sum is sandwiched between
    Z_IS * Y^g and Z_IS * Z_IS(widget)^g."""
    mu, eps = to_rat(mu), to_rat(eps)
    degs = b.right_degrees()
    d = max(degs, default=0)
    n = b.left + b.right
    if d <= 1:
        params = PadParams(s_pad=0, d=d, g=0, mu_lo=mu, mu_hi=mu,
                           y_value=ONE, z_psi=ONE)
        trace = ReductionTrace(stage="semiregular-pad", instance=b, scale=ONE,
                               eps_used=eps, data={"g": 0, "d": d})
        return b, params, trace
    mu_lo, mu_hi = 4 * mu / 5, 4 * mu / 3
    target = eps / (6 * d * n)
    s = 1
    while True:
        prof_lo = pad_profile(d, s, mu_lo)
        prof_hi = pad_profile(d, s, mu_hi)
        lhs = max(prof_hi["D"] - 1, prof_hi["U"]) / prof_lo["L"]
        if lhs <= target:
            break
        s += 1

    prof = pad_profile(d, s, mu)
    y_value = prof["Y"]
    z_psi = prof["L"] + (ONE + mu) * prof["D"] - 1

    edges = list(b.sorted_edges())
    left_n, right_n = b.left, b.right
    g = 0
    for v in range(b.right):
        for _ in range(d - degs[v]):
            z_base, y_base = left_n, right_n
            left_n += d
            right_n += s
            for zi in range(d):
                for yi in range(s):
                    edges.append((z_base + zi, y_base + yi))
            edges.append((z_base, v))  # right vertex v gains one edge
            g += 1
    padded = BipartiteGraph.build(left_n, right_n, edges)
    params = PadParams(s_pad=s, d=d, g=g, mu_lo=mu_lo, mu_hi=mu_hi,
                       y_value=y_value, z_psi=z_psi)
    trace = ReductionTrace(
        stage="semiregular-pad",
        instance=padded,
        scale=ONE / params.y_power,
        eps_used=eps,
        warnings=[] if g == 0 else [
            "sandwich stage: scale uses the widget's z1-free contribution; "
            f"upper slack factor (Z_psi/Y)^g <= e^(eps/3) by the choice of s={s}"
        ],
        data={"g": g, "d": d, "s_pad": s, "y_power": params.y_power,
              "z_psi_power": params.z_psi_power},
    )
    return padded, params, trace


# -- stage 3: apex hypergraph ---------------------------------------------------------------

def semiregular_to_hypertutte(b: BipartiteGraph, mu) -> tuple[WeightedHypergraph, Rat, ReductionTrace]:
    """Hypergraph on the left side plus an apex vertex; every right vertex
    v becomes the hyperedge N(v) + apex with weight mu.  Exactly:
    Z_IS(B; mu) = (mu+1)^{-1} Z_Tutte(H; mu+1, mu)."""
    mu = to_rat(mu)
    if mu <= 0:
        raise ValueError("mu must be positive")
    apex = b.left
    hyperedges = []
    for v in range(b.right):
        hyperedges.append(tuple(b.right_neighbours(v)) + (apex,))
    h = WeightedHypergraph.build(b.left + 1, hyperedges, mu)
    scale = ONE / (mu + 1)
    trace = ReductionTrace(stage="apex-hypertutte", instance=h, scale=scale,
                           eps_used=ZERO, data={"q": mu + 1, "gamma": mu})
    return h, scale, trace


# -- stage 4: hyperedge simulation by gadgets ------------------------------------------------

def largest_eta(chi: Rat, gamma: Rat, precision_bits: int = 128) -> Rat:
    """Largest 64-bit dyadic eta with 1 + eta(1+e^chi gamma)/(1-eta) <= e^chi,
    i.e. eta <= (e^chi - 1)/(e^chi (1+gamma))."""
    exp_lo, exp_hi = exp_bounds(chi, precision_bits)
    bound = (exp_lo - 1) / (exp_hi * (ONE + gamma))
    if bound <= 0:
        raise ValueError("chi too small to admit a positive eta")
    scaled = rat_floor(bound * (1 << 64))
    if scaled < 1:
        raise ValueError("eta underflows 64-bit dyadic resolution")
    return to_rat(scaled) / (1 << 64)


def prescribed_gadget_size(t: int, eta: Rat, n0: int = 0) -> int:
    """Smallest N with integer N^(1/4) exceeding max(t^16, eta^(-1/8), n0)."""
    a = 1
    while True:
        a += 1
        N = a**4
        if N <= t**16 or N <= n0:
            continue
        if eta * to_rat(N) ** 8 <= 1:  # N <= eta^(-1/8)
            continue
        return N


@dataclass
class TwoWeightReduction:
    graph: WeightedGraph
    gamma_prime: Rat
    gamma_dblprime: Rat
    c: Rat
    c_exact: bool
    m: int
    chi: Rat
    eta: Rat
    N: int
    t: int
    tune: object
    gadget_spec: GadgetSpec | None


def hyper_to_twoweight(h: WeightedHypergraph, q, gamma, eps, *,
                       N_override: int | None = None, n0: int = 0,
                       max_auto_N: int = 256) -> tuple[TwoWeightReduction, ReductionTrace]:
    """Replace every t-ary hyperedge by a two-clique gadget whose tuned
    clique probability balances the joined and fully-split terminal
    configurations at ratio gamma.

    The output graph carries two weights: rho/(1-rho) inside cliques and
    N^(-3/4)/(1-N^(-3/4)) on clique-terminal edges.  The stage constant c
    approximates the fully-split gadget contribution Z(bottom) within
    e^(+-chi); at desk scale it is computed from the exact table (or a
    certified enclosure when grid points are too large to expand).
    """
    q, gamma, eps = to_rat(q), to_rat(gamma), to_rat(eps)
    if gamma <= 0 or eps <= 0:
        raise ValueError("need gamma > 0 and eps > 0")
    m = h.m
    warnings = []
    if m == 0:
        g_hat = WeightedGraph.build(h.n, [], None)
        red = TwoWeightReduction(
            graph=g_hat, gamma_prime=ZERO, gamma_dblprime=ZERO, c=ONE,
            c_exact=True, m=0, chi=ZERO, eta=ZERO, N=0, t=0, tune=None,
            gadget_spec=None)
        trace = ReductionTrace(stage="two-weight", instance=g_hat, scale=ONE,
                               eps_used=eps, data={"m": 0})
        return red, trace

    t = h.arity()
    if t is None:
        raise ValueError("hypergraph is not uniform")
    if t < 2:
        raise ValueError("gadget simulation needs hyperedges of arity >= 2")
    chi = eps / (4 * m)
    eta = largest_eta(chi, gamma)

    if N_override is None:
        N = prescribed_gadget_size(t, eta, n0)
        if N > max_auto_N:
            raise ValueError(
                f"prescribed gadget size N={N} is beyond desk scale; "
                "pass N_override (a fourth power >= 16)"
            )
    else:
        N = int(N_override)
        if fourth_root(N) is None or fourth_root(N) < 2:
            raise ValueError("N_override must be a fourth power >= 16")
        warnings.append(
            f"N overridden to {N}; asymptotic guarantees need "
            f"N > max(t^16={t**16}, eta^(-1/8), N0)"
        )

    evaluator = zeta_evaluator(N, t, q)
    tune = tune_rho(N, t, q, gamma, chi, n0=n0, evaluator=evaluator)
    if tune.below_asymptotic_n:
        warnings.append(
            "tuned below the asymptotic regime: the exact decomposition "
            "identity holds, the e^(2 chi m) contract is not certified"
        )
    rho = tune.rho
    a = fourth_root(N)
    kt = to_rat(1) / a**3
    spec = GadgetSpec(N=N, t=t, rho=rho, kt_prob=kt, kt_exact=True)
    gamma_prime = spec.gamma_prime
    gamma_dblprime = spec.gamma_dblprime

    verts = h.n
    edges = []
    weights = []
    for f in h.hyperedges:
        terms = tuple(sorted(set(f)))
        base = verts
        verts += N
        for i in range(N):
            for j in range(i + 1, N):
                edges.append((base + i, base + j))
                weights.append(gamma_prime)
        for i in range(N):
            for u in terms:
                edges.append((base + i, u))
                weights.append(gamma_dblprime)
    g_hat = WeightedGraph.build(verts, edges, weights)

    v_total = g_hat.n
    lo_w = to_rat(1) / v_total**3
    if not (lo_w <= gamma_prime <= 1 and lo_w <= gamma_dblprime <= 1):
        warnings.append(
            f"weights ({gamma_prime}, {gamma_dblprime}) fall outside "
            f"[|V|^-3, 1] = [{lo_w}, 1]; the two-weight problem form needs "
            "larger N"
        )

    # c approximates Z(bottom) = Z^t within e^(+-chi); exact when the tuned
    # rho is small enough to expand
    zt_poly = evaluator.z_polys[t]
    if tune.zeta_exact:
        c = zt_poly(gamma_prime)
        c_exact = True
    else:
        lo, hi = _poly_bounds(zt_poly, tune, evaluator)
        c = (lo + hi) / 2
        c_exact = False
        warnings.append("c taken as midpoint of a certified enclosure of Z(bottom)")

    red = TwoWeightReduction(
        graph=g_hat, gamma_prime=gamma_prime, gamma_dblprime=gamma_dblprime,
        c=c, c_exact=c_exact, m=m, chi=chi, eta=eta, N=N, t=t, tune=tune,
        gadget_spec=spec)
    trace = ReductionTrace(
        stage="two-weight", instance=g_hat, scale=ONE / c**m, eps_used=eps,
        warnings=warnings,
        data={"m": m, "t": t, "N": N, "chi": chi, "eta": eta, "rho": rho,
              "gamma_prime": gamma_prime, "gamma_dblprime": gamma_dblprime},
    )
    return red, trace


def _poly_bounds(poly, tune, evaluator):
    import mpmath

    from .gadget import _iv_bounds, _iv_from_rat

    iv = mpmath.iv
    old = iv.prec
    try:
        iv.prec = 320
        rho = _iv_from_rat(iv, tune.rho)
        gp = rho / (1 - rho)
        acc = iv.mpf(0)
        for coef in reversed(poly.c):
            acc = acc * gp + _iv_from_rat(iv, coef)
    finally:
        iv.prec = old
    return _iv_bounds(acc)


def gadget_decomposition_value(h: WeightedHypergraph, spec: GadgetSpec, q,
                               max_edges=None) -> Rat:
    """Evaluate the glued-gadget graph's Tutte value through the partition
    decomposition: sum over per-hyperedge terminal partitions of
    q^blocks(join) * prod_j Z_j(partition_j).

    Independent of direct enumeration of the glued graph, which the tests
    compare it against.
    """
    from .gadget import z_by_partition

    q = to_rat(q)
    zmap = z_by_partition(spec, q, max_edges=max_edges)
    t = spec.t
    locals_ = [tuple(sorted(set(f))) for f in h.hyperedges]
    for f in locals_:
        if len(f) != t:
            raise ValueError("hypergraph arity does not match the gadget")
    term_parts = list(zmap.keys())
    total = ZERO
    for combo in itertools.product(term_parts, repeat=h.m):
        weight = ONE
        joined = Partition.discrete(range(h.n))
        for f, part in zip(locals_, combo):
            weight *= zmap[part]
            relabel = Partition.of(
                [[f[i] for i in block] for block in part.blocks],
                ground=f,
            )
            joined = partition_join(joined, relabel)
        total += weight * q ** len(joined)
    return total


# -- series/parallel weight calculus ---------------------------------------------------------

def parallel_compose(g1, g2) -> Rat:
    """Effective weight of two parallel edges: (1+g1)(1+g2) - 1."""
    g1, g2 = to_rat(g1), to_rat(g2)
    if g1 <= -1 or g2 <= -1:
        raise ValueError("weights must exceed -1")
    return (ONE + g1) * (ONE + g2) - 1


def series_compose(g1, g2, q) -> tuple[Rat, Rat]:
    """Effective weight of two edges in series, with the extra factor the
    substitution introduces: (g1 g2/(q+g1+g2), q+g1+g2)."""
    g1, g2, q = to_rat(g1), to_rat(g2), to_rat(q)
    denom = q + g1 + g2
    if denom == 0:
        raise ValueError("series composition undefined: q + g1 + g2 = 0")
    gstar = g1 * g2 / denom
    if gstar != 0:
        assert (ONE + q / gstar) == (ONE + q / g1) * (ONE + q / g2)
    return gstar, denom


# composition trees: ("edge",) | ("series", children) | ("parallel", children)

def fold_tree(node, base_weight: Rat, q: Rat) -> tuple[Rat, Rat, int]:
    """(realized weight, accumulated scale, edge count) of a tree."""
    kind = node[0]
    if kind == "edge":
        return base_weight, ONE, 1
    values = [fold_tree(child, base_weight, q) for child in node[1]]
    if kind == "series":
        val, scale, edges = values[0]
        for v2, s2, e2 in values[1:]:
            val, extra = series_compose(val, v2, q)
            scale = scale * s2 * extra
            edges += e2
        return val, scale, edges
    if kind == "parallel":
        val, scale, edges = values[0]
        for v2, s2, e2 in values[1:]:
            val = parallel_compose(val, v2)
            scale = scale * s2
            edges += e2
        return val, scale, edges
    raise ValueError(f"unknown node kind {kind!r}")


def expand_tree(node, base_weight: Rat, s: int, t: int, next_vertex: int,
                edges: list, weights: list) -> int:
    """Materialise a tree as edges between s and t; returns the next free
    vertex id after allocating interior vertices."""
    kind = node[0]
    if kind == "edge":
        edges.append((s, t))
        weights.append(base_weight)
        return next_vertex
    if kind == "series":
        children = node[1]
        prev = s
        for i, child in enumerate(children):
            if i == len(children) - 1:
                nxt = t
            else:
                nxt = next_vertex
                next_vertex += 1
            next_vertex = expand_tree(child, base_weight, prev, nxt,
                                      next_vertex, edges, weights)
            prev = nxt
        return next_vertex
    if kind == "parallel":
        for child in node[1]:
            next_vertex = expand_tree(child, base_weight, s, t, next_vertex,
                                      edges, weights)
        return next_vertex
    raise ValueError(f"unknown node kind {kind!r}")


@dataclass(frozen=True)
class WeightImplementation:
    """A series/parallel network of uniform-weight edges realizing a target
    two-terminal weight from below, within pi_tol."""

    tree: tuple
    target: Rat
    realized_value: Rat
    accumulated_scale: Rat
    edge_count: int
    base_weight: Rat
    q: Rat
    parallel_count: int

    def expanded_graph(self) -> tuple[WeightedGraph, int, int]:
        """(graph, s, t) with s=0, t=1 and interior vertices above."""
        edges: list = []
        weights: list = []
        n = expand_tree(self.tree, self.base_weight, 0, 1, 2, edges, weights)
        return WeightedGraph.build(n, edges, weights), 0, 1


def implement_weight(target, q_hat, gamma_hat, pi_tol, *,
                     max_parallel_edges: int | None = None) -> WeightImplementation:
    """Realize `target` in (0,1] from uniform weight gamma_hat at q_hat.

    A series chain of k base edges gives a weight g1 <= 1/4; series powers
    of that chain give a geometric family g_j; greedily taking d_j parallel
    copies of each g_j drives the product (1+g_j)^d_j up to 1+target from
    below, stopping within pi_tol after m rounds.
    """
    target, q, gh, pi = to_rat(target), to_rat(q_hat), to_rat(gamma_hat), to_rat(pi_tol)
    if not 0 < target <= 1:
        raise ValueError("target weight must lie in (0, 1]")
    if q <= 2 or gh <= 0:
        raise ValueError("need q > 2 and gamma_hat > 0")
    if pi <= 0 or pi > target:
        raise ValueError("pi_tol must lie in (0, target]")

    base = ONE + q / gh
    k = max(1, _min_power_at_least(base, 1 + 4 * q))
    g1 = q / (base**k - 1)
    assert g1 <= to_rat(1) / 4

    base1 = ONE + q / g1
    m = max(1, _min_power_at_least(base1, q * (ONE + target) / pi + 1))

    def g_j(j: int) -> Rat:
        return q / (base1**j - 1)

    remaining = ONE + target
    d: list[int] = []
    chains: list = []
    for j in range(1, m + 1):
        gj = g_j(j)
        dj = 0
        factor = ONE + gj
        while factor ** (dj + 1) <= remaining:
            dj += 1
        remaining = remaining / factor**dj
        d.append(dj)
        chain_j = ("series", tuple(("series", (("edge",),) * k) for _ in range(j)))
        chains.extend([chain_j] * dj)

    if max_parallel_edges is not None and sum(d) > max_parallel_edges:
        raise ValueError(
            f"implementation needs {sum(d)} parallel components, "
            f"budget {max_parallel_edges}"
        )
    if not chains:
        raise ValueError(f"no parallel component fits under target {target}")
    tree = chains[0] if len(chains) == 1 else ("parallel", tuple(chains))

    realized, scale, edges = fold_tree(tree, gh, q)
    # closed form for the same quantity, as a cross-check
    closed = ONE
    for j, dj in enumerate(d, start=1):
        closed *= (ONE + g_j(j)) ** dj
    assert realized == closed - 1
    if not target - pi <= realized <= target:
        raise AssertionError(
            f"realized weight {realized} misses [{target - pi}, {target}]"
        )
    return WeightImplementation(
        tree=tree, target=target, realized_value=realized,
        accumulated_scale=scale, edge_count=edges, base_weight=gh, q=q,
        parallel_count=sum(d),
    )


@dataclass
class UniformReduction:
    graph: WeightedGraph
    scale: Rat
    implementations: dict
    realized_graph: WeightedGraph
    chi: Rat
    warnings: list


def twoweight_to_uniform(g: WeightedGraph, q, gamma, eps, *,
                         enforce_budget: bool = False) -> tuple[UniformReduction, ReductionTrace]:
    """Replace every edge weight by a series/parallel network of uniform
    weight gamma.  Exactly: Z(expanded; q, gamma) = scale * Z(g; q,
    realized weights), and each realized weight sits within pi of its
    target, pi = chi/(2 |V|^3) with chi = eps/(4 (|V| + |E|^2))."""
    q, gamma, eps = to_rat(q), to_rat(gamma), to_rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    nv, ne = g.n, g.m
    chi = eps / (4 * (nv + ne**2))
    warnings = []
    lo_w = to_rat(1) / nv**3 if nv else ZERO
    targets = sorted(set((w.numerator, w.denominator) for w in g.weights))
    impls: dict = {}
    budget = ne if enforce_budget else None
    one_minus_exp = 1 - exp_bounds(-chi)[1]
    for key in targets:
        w = to_rat(key[0]) / key[1]
        if not lo_w <= w <= 1:
            raise ValueError(
                f"edge weight {w} outside [|V|^-3, 1] = [{lo_w}, 1]"
            )
        if w == gamma:
            impls[key] = None  # already the uniform weight
            continue
        pi = chi / (2 * nv**3)
        cap = w * one_minus_exp
        if pi > cap:
            pi = cap
            warnings.append(f"pi for weight {w} tightened to {pi}")
        impls[key] = implement_weight(w, q, gamma, pi, max_parallel_edges=budget)

    edges: list = []
    weights: list = []
    next_vertex = nv
    scale = ONE
    realized_weights = []
    for (u, v), w in zip(g.edges, g.weights):
        key = (w.numerator, w.denominator)
        impl = impls[key]
        if impl is None:
            edges.append((u, v))
            weights.append(gamma)
            realized_weights.append(gamma)
            continue
        next_vertex = expand_tree(impl.tree, gamma, u, v, next_vertex, edges, weights)
        scale *= impl.accumulated_scale
        realized_weights.append(impl.realized_value)
    expanded = WeightedGraph.build(next_vertex, edges, weights)
    realized = WeightedGraph.build(g.n, g.edges, realized_weights)
    red = UniformReduction(graph=expanded, scale=scale, implementations=impls,
                           realized_graph=realized, chi=chi, warnings=warnings)
    trace = ReductionTrace(
        stage="uniform-weight", instance=expanded, scale=ONE / scale,
        eps_used=eps, warnings=warnings,
        data={"chi": chi, "expanded_edges": expanded.m,
              "distinct_weights": len(targets)},
    )
    return red, trace


# -- the 3-uniform Ising direction ----------------------------------------------------------

@dataclass(frozen=True)
class Ising3Reduction:
    graph: WeightedGraph
    gamma_prime: Rat
    y_prime: Rat
    scale: Rat
    exact: bool


def ising3_reduce(h: WeightedHypergraph, gamma, *,
                  precision_bits: int | None = None) -> Ising3Reduction:
    """Each 3-vertex hyperedge becomes a triangle with weight
    gamma' = (1+gamma)^(1/2) - 1 (parallel edges kept), so that at q = 2:
    Z_Potts(G; 2, gamma') = y'^m Z_Potts(H; 2, gamma) with y' = 1+gamma'.

    gamma' is exact when 1+gamma is a perfect rational square; otherwise a
    rational approximation at precision_bits is used and flagged."""
    gamma = to_rat(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if h.m > 0 and h.arity() != 3:
        raise ValueError("hypergraph is not 3-uniform")
    y = ONE + gamma
    y_prime = sqrt_rat_exact(y)
    exact = y_prime is not None
    if y_prime is None:
        if precision_bits is None:
            raise ValueError(
                f"1+gamma = {y} is not a perfect square; pass precision_bits "
                "to accept a rational approximation"
            )
        from .rationals import sqrt_bounds

        lo, hi = sqrt_bounds(y, precision_bits)
        y_prime = (lo + hi) / 2
    gamma_prime = y_prime - 1
    edges = []
    for f in h.hyperedges:
        u, v, w = sorted(set(f))
        edges.extend([(u, v), (v, w), (u, w)])
    graph = WeightedGraph.build(h.n, edges, gamma_prime)
    return Ising3Reduction(graph=graph, gamma_prime=gamma_prime,
                           y_prime=y_prime, scale=y_prime**h.m, exact=exact)


# -- the whole pipeline ----------------------------------------------------------------------

@dataclass
class PipelineResult:
    traces: list
    final_graph: WeightedGraph
    final_gamma: Rat
    q: Rat
    blowup: MaxISBlowup
    pad: PadParams
    eps: Rat

    def recover_max_is_interval(self, z_final: Rat) -> tuple[Rat, Rat]:
        """Propagate an exact final Tutte value back through the stages,
        returning rational bounds on the blow-up's independent-set sum
        divided by the extraction divisor (sandwich slack comes from the
        padding stage only when widgets were attached)."""
        z = to_rat(z_final)
        for trace in reversed(self.traces):
            if trace.stage in ("apex-hypertutte", "two-weight", "uniform-weight"):
                z = z * trace.scale
        # padding sandwich: Z_IS(B') in [Z_padded / Zpsi^g, Z_padded / Y^g]
        lo = z / self.pad.z_psi_power
        hi = z / self.pad.y_power
        return lo / self.blowup.divisor, hi / self.blowup.divisor

    def recover_max_is_count(self, z_final: Rat) -> int:
        lo, hi = self.recover_max_is_interval(z_final)
        lo_i, hi_i = rat_floor(lo), rat_floor(hi)
        if lo_i != hi_i:
            raise ValueError(
                f"count interval [{lo}, {hi}] spans more than one integer"
            )
        return hi_i


def run_pipeline(b: BipartiteGraph, q, gamma, eps, *,
                 N_override: int | None = None, n0: int = 0) -> PipelineResult:
    """Chain the four reduction stages from a bipartite instance down to a
    uniform-weight Tutte instance at (q, gamma), threading scale factors
    and splitting the error budget eps evenly across the four lemma-level
    stages (the first stage's two constructions share one quarter)."""
    q, gamma, eps = to_rat(q), to_rat(gamma), to_rat(eps)
    if q <= 2:
        raise ValueError("pipeline target needs q > 2")
    mu = q - 1
    quarter = eps / 4
    traces = []

    try:
        blow, tr1 = maxis_blowup(b, mu, quarter / 2)
        traces.append(tr1)
    except Exception as exc:
        raise type(exc)(f"[stage maxis-blowup] {exc}") from exc
    try:
        padded, pad, tr2 = semiregular_pad(blow.graph, mu, quarter / 2)
        traces.append(tr2)
    except Exception as exc:
        raise type(exc)(f"[stage semiregular-pad] {exc}") from exc
    try:
        h, _, tr3 = semiregular_to_hypertutte(padded, mu)
        tr3.eps_used = quarter
        traces.append(tr3)
    except Exception as exc:
        raise type(exc)(f"[stage apex-hypertutte] {exc}") from exc
    try:
        red4, tr4 = hyper_to_twoweight(h, q, mu, quarter,
                                       N_override=N_override, n0=n0)
        traces.append(tr4)
    except NoCrossingError as exc:
        raise NoCrossingError(
            f"[stage two-weight] {exc}", rho_lo=exc.rho_lo, zeta_lo=exc.zeta_lo,
            rho_hi=exc.rho_hi, zeta_hi=exc.zeta_hi, window=exc.window,
            grid_points=exc.grid_points) from exc
    except Exception as exc:
        raise type(exc)(f"[stage two-weight] {exc}") from exc
    try:
        if red4.m == 0:
            final_graph = red4.graph
            tr5 = ReductionTrace(stage="uniform-weight", instance=final_graph,
                                 scale=ONE, eps_used=quarter, data={"m": 0})
            traces.append(tr5)
        else:
            red5, tr5 = twoweight_to_uniform(red4.graph, q, gamma, quarter)
            final_graph = red5.graph
            traces.append(tr5)
    except Exception as exc:
        raise type(exc)(f"[stage uniform-weight] {exc}") from exc

    spent = sum((t.eps_used for t in traces), ZERO)
    assert spent == eps, f"budget mismatch: {spent} != {eps}"
    return PipelineResult(traces=traces, final_graph=final_graph,
                          final_gamma=gamma, q=q, blowup=blow, pad=pad, eps=eps)
