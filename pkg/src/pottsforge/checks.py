"""Exact-identity replays shared by the verify CLI and the acceptance suite.

Every function either returns a small summary dict or raises
AssertionError with the first counterexample.  All comparisons are exact
rational equalities unless explicitly statistical (stationarity).
"""

from __future__ import annotations

import itertools
from math import comb

import mpmath
import numpy as np

from . import backend, exact
from . import randomcluster as rcm
from . import reductions as red
from .errors import NoCrossingError
from .gadget import (
    GadgetSpec,
    dp_weights,
    phase_constants,
    tune_rho,
    tuner_grid,
    z_k,
    zeta_evaluator,
)
from .graphs import BipartiteGraph, WeightedGraph, WeightedHypergraph
from .rationals import ONE, ZERO, Rat, to_rat
from .rng import Xoshiro256StarStar, splitmix64_stream


def _all_hypergraphs(max_n: int, max_edges: int):
    """All hypergraphs up to isomorphism-free labelling: every multiset of
    at most max_edges nonempty vertex subsets, for every n <= max_n."""
    for n in range(max_n + 1):
        supports = []
        for size in range(1, n + 1):
            supports.extend(itertools.combinations(range(n), size))
        for m in range(max_edges + 1):
            for combo in itertools.combinations_with_replacement(supports, m):
                yield n, combo


def check_fk(max_n: int = 4, max_edges: int = 4, gammas=(1, 2, 3), qs=(2, 3, 4)):
    """Exhaustive Fortuin-Kasteleyn equality sweep."""
    gammas = [to_rat(g) for g in gammas]
    checked = 0
    for n, combo in _all_hypergraphs(max_n, max_edges):
        for q in qs:
            h1 = WeightedHypergraph.build(n, combo, 1)
            hist = exact.potts_mono_histogram(h1, q)
            for gamma in gammas:
                h = WeightedHypergraph.build(n, combo, gamma)
                potts_val = ZERO
                for mask, count in hist.items():
                    potts_val += to_rat(count) * (ONE + gamma) ** bin(mask).count("1")
                tutte_val = exact.tutte_hypergraph(h, to_rat(q))
                assert potts_val == tutte_val, (n, combo, q, gamma)
                checked += 1
    return {"identities": checked}


def gadget_census(t: int, N: int):
    """Edge-subset census of the variant gadget with positional weight
    classes (clique edges class 0, clique-terminal edges class 1)."""
    n = N + t
    eu, ev, wclass = [], [], []
    for i in range(N):
        for j in range(i + 1, N):
            eu.append(i)
            ev.append(j)
            wclass.append(0)
    for i in range(N):
        for term in range(N, N + t):
            eu.append(i)
            ev.append(term)
            wclass.append(1)
    terminal = [v >= N for v in range(n)]
    return backend.subset_class_counts(n, eu, ev, wclass, 2, terminal)


def census_w(counts, gp: Rat, gpp: Rat) -> dict:
    """Fold a census into {(k, l): w} at concrete weights."""
    out: dict = {}
    gp_pow = [ONE]
    for _ in range(counts.shape[2] - 1):
        gp_pow.append(gp_pow[-1] * gp)
    gpp_pow = [ONE]
    for _ in range(counts.shape[3] - 1):
        gpp_pow.append(gpp_pow[-1] * gpp)
    for idx in zip(*np.nonzero(counts)):
        k, ell, a, b = (int(x) for x in idx)
        val = to_rat(int(counts[idx])) * gp_pow[a] * gpp_pow[b]
        out[(k, ell)] = out.get((k, ell), ZERO) + val
    return out


def check_dp(t_max: int = 3, n_max: int = 5, pairs: int = 20, seed: int = 2024):
    """Dynamic program equals brute-force subset classification."""
    rng = Xoshiro256StarStar(seed)
    checked = 0
    for t in range(t_max + 1):
        for N in range(n_max + 1):
            counts = gadget_census(t, N)
            for _ in range(pairs):
                gp = to_rat(1 + rng.rand_below(40)) / (41 + rng.rand_below(40))
                gpp = to_rat(1 + rng.rand_below(40)) / (41 + rng.rand_below(40))
                want = census_w(counts, gp, gpp)
                table = dp_weights(t, N, gp, gpp)
                for k in range(t + 1):
                    for ell in range(N + 1):
                        assert table.w(t, N, k, ell) == want.get((k, ell), ZERO), \
                            (t, N, k, ell, gp, gpp)
                        checked += 1
    return {"entries": checked}


def check_wiring(t_max: int = 3, n_max: int = 4, rhos=("1/8", "1/3")):
    """Z^k/Z from the DP equals the law of Y from variant-gadget
    enumeration, and (on gadgets small enough) equals the conditional law
    under the full gadget with its boundary edges forced in."""
    checked = 0
    for t in range(1, t_max + 1):
        for N in range(1, n_max + 1):
            for rho in rhos:
                rho = to_rat(rho)
                # N = 1 would give boundary probability 1; use an explicit
                # finite clique-terminal probability there
                spec = (GadgetSpec(N, t, rho, to_rat("1/2"), True) if N == 1
                        else GadgetSpec(N, t, rho, *_default_kt(N)))
                dist = exact.exact_y_distribution(spec, 3)
                if t >= 1:
                    table = dp_weights(t, N, spec.gamma_prime, spec.gamma_dblprime)
                    summary = z_k(table, 3)
                    total = summary.z_total
                    for k in range(1, t + 1):
                        assert dist[k] == summary.z[k] / total, (t, N, rho, k)
                        checked += 1
                if comb(N + t, 2) <= 12:
                    law = _forced_boundary_y_law(spec, 3)
                    for k in range(1, t + 1):
                        assert law.get(k, ZERO) == dist[k], (t, N, rho, k)
                        checked += 1
    return {"identities": checked}


def _default_kt(N):
    from .gadget import default_kt_prob

    return default_kt_prob(N)


def _forced_boundary_y_law(spec: GadgetSpec, q) -> dict:
    """Law of Y under RC on the full gadget (boundary at probability 1),
    by direct enumeration of full-gadget subsets."""
    q = to_rat(q)
    g, probs = spec.full_graph()
    terminals = set(spec.terminal_vertices())
    n_var = len(spec.variant_edge_pairs())
    weights: dict = {}
    from .graphs import connected_components

    for size in range(g.m + 1):
        for sub in itertools.combinations(range(g.m), size):
            sub = frozenset(sub)
            w = rcm.rc_weight(g, sub, q, probs)
            if w == 0:
                continue
            # Y counts terminal components after boundary edges are removed
            var_part = frozenset(e for e in sub if e < n_var)
            _, part = connected_components(g, var_part)
            y = sum(1 for blk in part.blocks if set(blk) & terminals)
            weights[y] = weights.get(y, ZERO) + w
    total = sum(weights.values(), ZERO)
    return {k: v / total for k, v in weights.items()}


def check_couplings(n_graphs: int = 20, steps: int = 10_000, n: int = 10,
                    seed: int = 77):
    """Run every coupling kind on random graphs; any containment violation
    raises from inside the kernel."""
    seeds = splitmix64_stream(seed, n_graphs * 8)
    runs = 0
    for i in range(n_graphs):
        rng = Xoshiro256StarStar(seeds[i])
        edges = []
        for u in range(n):
            for v in range(u + 1, n):
                if rng.rand_below(100) < 35:
                    edges.append((u, v))
        if not edges:
            edges = [(0, 1)]
        g = WeightedGraph.build(n, edges, 1)
        p = ["2/5"] * g.m
        pp = ["3/5"] * g.m
        for kind in rcm.COUPLING_KINDS:
            cs = rcm.run_coupled(
                g, kind, 3, p, rcm.NO_CONDITIONING, steps, seeds[n_graphs + i],
                p_prime=pp if kind == "rc-monotone-p" else None,
            )
            assert cs.lower.edges <= cs.upper.edges
            runs += 1
    return {"coupled_runs": runs, "steps_each": steps}


def _all_multigraphs(max_edges: int, n: int = 4):
    pairs = list(itertools.combinations(range(n), 2))
    for m in range(max_edges + 1):
        for combo in itertools.combinations_with_replacement(pairs, m):
            yield combo


def check_fundamental_lemma(max_edges: int = 4, rs=("1/2", "1/3"), qs=(2, 3)):
    """Exact conditional-law equality for the red/green decomposition over
    all 4-vertex multigraphs with at most max_edges edges."""
    pairs_checked = 0
    graphs = 0
    for combo in _all_multigraphs(max_edges):
        g = WeightedGraph.build(4, combo, 1)
        p = [to_rat(e + 1) / (e + 3) for e in range(g.m)]
        for r in rs:
            for q in qs:
                pairs_checked += rcm.fundamental_lemma_check(g, q, p, r)
        graphs += 1
    return {"graphs": graphs, "joint_pairs": pairs_checked}


def check_stationarity(samples: int = 1_000_000, seed: int = 4242,
                       p_threshold: float = 1e-3):
    """Chi-squared goodness of fit of long heat-bath runs against the exact
    random-cluster law on 3-edge graphs."""
    configs = [
        ("triangle", WeightedGraph.build(3, [(0, 1), (1, 2), (0, 2)], 1), "2"),
        ("path", WeightedGraph.build(4, [(0, 1), (1, 2), (2, 3)], 1), "5/2"),
        ("parallel-pendant", WeightedGraph.build(3, [(0, 1), (0, 1), (1, 2)], 1), "3"),
    ]
    p_edge = ["1/2", "1/3", "2/3"]
    results = {}
    seeds = splitmix64_stream(seed, len(configs))
    for (name, g, q), s in zip(configs, seeds):
        law = rcm.rc_distribution(g, q, p_edge)
        thin = 8 * g.m
        burnin = 64 * g.m
        steps = burnin + thin * samples
        _, visits = rcm.run_chain(g, rcm.RCModel(to_rat(q)), p_edge,
                                  rcm.NO_CONDITIONING, steps, s,
                                  record_mode=1, rec_a=burnin, rec_b=thin)
        total = int(visits.sum())
        chisq = 0.0
        for sub, pr in law.items():
            mask = sum(1 << e for e in sub)
            expected = total * pr
            ef = float(expected.numerator) / float(expected.denominator)
            chisq += (int(visits[mask]) - ef) ** 2 / ef
        df = len(law) - 1
        with mpmath.workprec(64):
            pval = float(mpmath.gammainc(df / 2, chisq / 2, mpmath.inf,
                                         regularized=True))
        assert pval > p_threshold, (name, chisq, pval)
        results[name] = pval
    return results


def check_apex_identity(max_vertices: int = 6, mus=("1/2", "1", "2")):
    """Z_IS(B; mu) = (mu+1)^{-1} Z_Tutte(H; mu+1, mu) for every bipartite B
    with at most max_vertices vertices."""
    checked = 0
    for nl in range(0, max_vertices + 1):
        for nr in range(0, max_vertices + 1 - nl):
            pairs = [(u, v) for u in range(nl) for v in range(nr)]
            for mask in range(1 << len(pairs)):
                edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
                b = BipartiteGraph.build(nl, nr, edges)
                for mu in mus:
                    mu = to_rat(mu)
                    h, scale, _ = red.semiregular_to_hypertutte(b, mu)
                    assert red.z_is(b, mu) == scale * exact.tutte_hypergraph(h, mu + 1)
                    checked += 1
    return {"identities": checked}


def check_decomposition(q="3", rho="1/8"):
    """Glued-gadget Tutte value equals the per-hyperedge partition
    decomposition, for t = 2 gadgets with N <= 4 and m <= 2 hyperedges."""
    q = to_rat(q)
    rho = to_rat(rho)
    shapes = {
        "single": WeightedHypergraph.build(2, [(0, 1)], 1),
        "overlap": WeightedHypergraph.build(3, [(0, 1), (1, 2)], 1),
        "disjoint": WeightedHypergraph.build(4, [(0, 1), (2, 3)], 1),
    }
    checked = 0
    for N in (2, 3, 4):
        kt, _ = _default_kt(N)
        spec = GadgetSpec(N, 2, rho, kt, True)
        for name, h in shapes.items():
            g_hat = _glue_gadgets(h, spec)
            lhs = exact.tutte_graph(g_hat, q, max_edges=max(28, g_hat.m))
            rhs = red.gadget_decomposition_value(h, spec, q)
            assert lhs == rhs, (N, name)
            checked += 1
    return {"identities": checked}


def _glue_gadgets(h: WeightedHypergraph, spec: GadgetSpec) -> WeightedGraph:
    edges, weights = [], []
    vid = h.n
    for f in h.hyperedges:
        terms = tuple(sorted(set(f)))
        K = list(range(vid, vid + spec.N))
        vid += spec.N
        for a in range(spec.N):
            for b in range(a + 1, spec.N):
                edges.append((K[a], K[b]))
                weights.append(spec.gamma_prime)
        for i in K:
            for u in terms:
                edges.append((i, u))
                weights.append(spec.gamma_dblprime)
    return WeightedGraph.build(vid, edges, weights)


def check_series_parallel(trials: int = 30, seed: int = 99):
    """Composition formulas match the two-terminal split exactly."""
    rng = Xoshiro256StarStar(seed)
    q = to_rat(3)
    checked = 0
    for _ in range(trials):
        g1 = to_rat(1 + rng.rand_below(8)) / (1 + rng.rand_below(8))
        g2 = to_rat(1 + rng.rand_below(8)) / (1 + rng.rand_below(8))
        # parallel pair
        gp = WeightedGraph.build(2, [(0, 1), (0, 1)], [g1, g2])
        ts = exact.terminal_split(gp, 0, 1, q)
        assert ts.implemented_weight(q) == red.parallel_compose(g1, g2)
        # series pair
        gs = WeightedGraph.build(3, [(0, 2), (2, 1)], [g1, g2])
        ts = exact.terminal_split(gs, 0, 1, q)
        gstar, scale = red.series_compose(g1, g2, q)
        assert ts.implemented_weight(q) == gstar
        assert ts.z_split == scale * q**2
        checked += 1
    return {"compositions": checked}


def check_ising3(gammas=(3, 8), max_n: int = 5, max_edges: int = 3):
    """Triangle-expansion identity at q=2 over all small 3-uniform
    hypergraphs."""
    checked = 0
    for n in range(3, max_n + 1):
        supports = list(itertools.combinations(range(n), 3))
        for m in range(max_edges + 1):
            for combo in itertools.combinations_with_replacement(supports, m):
                for gamma in gammas:
                    h = WeightedHypergraph.build(n, combo, gamma)
                    r = red.ising3_reduce(h, gamma)
                    lhs = exact.potts(
                        WeightedHypergraph.build(n, [tuple(e) for e in r.graph.edges],
                                                 r.gamma_prime)
                        if r.graph.m else WeightedHypergraph.build(n, [], None), 2)
                    rhs = r.scale * exact.potts(h, 2)
                    assert lhs == rhs, (n, combo, gamma)
                    checked += 1
    return {"identities": checked}


def check_implement_weight(n_targets: int = 50, seed: int = 31337,
                           pi_tol="1/1000000"):
    """Random targets in (0,1] at q=3, gamma=2: realized weight within
    tolerance below the target and equal to q Z_st / Z_s|t of the expansion."""
    rng = Xoshiro256StarStar(seed)
    pi = to_rat(pi_tol)
    q = to_rat(3)
    checked = 0
    for _ in range(n_targets):
        num = 1 + rng.rand_below(999)
        target = to_rat(num) / 1000
        impl = red.implement_weight(target, q, 2, pi)
        assert target - pi <= impl.realized_value <= target
        g, s, t = impl.expanded_graph()
        ts = exact.terminal_split_sweep(g, s, t, q)
        assert ts.implemented_weight(q) == impl.realized_value
        assert ts.z_split / q**2 == impl.accumulated_scale
        checked += 1
    return {"targets": checked}


def check_tuner_grid_monotone(N: int = 16, t: int = 2, q="3", chi="272"):
    """psi non-increasing (zeta non-decreasing) along the whole tuner grid."""
    q = to_rat(q)
    ev = zeta_evaluator(N, t, q)
    grid = tuner_grid(N, t, chi, phase_constants(q).lambda_lower)
    last = None
    for mu in range(grid.size):
        z = ev.zeta(grid.rho(mu))
        if last is not None:
            assert z >= last, (mu, last, z)
        last = z
    return {"grid_points": grid.size}


def _zeta_cmp(ev, grid, mu: int, threshold: Rat) -> int:
    """Sign of zeta(rho_mu) - threshold via certified enclosures, with an
    exact fallback for ties (mirrors the tuner's comparison discipline)."""
    prec = 192
    while prec <= (1 << 13):
        lo, hi = ev.zeta_bounds(grid.rho_lo, grid.one_plus_delta, mu, prec)
        if hi < threshold:
            return -1
        if lo > threshold:
            return 1
        prec *= 2
    z = ev.zeta(grid.rho(mu))
    return -1 if z < threshold else (1 if z > threshold else 0)


def check_tuner_configs(configs=None):
    """Bracketing endpoints imply a sandwich-satisfying result; otherwise
    NoCrossing (with endpoint report)."""
    if configs is None:
        configs = [
            ("3", "1/5", "1/4"), ("3", "1/4", "1/2"), ("3", "1/2", "1"),
            ("3", "1", "1"), ("3", "1000", "1/4"), ("3", "1/100000", "1/4"),
            ("4", "1/3", "1/2"), ("4", "2", "2"), ("5/2", "1/8", "1"),
            ("10/3", "3/4", "1"),
        ]
    evaluators: dict = {}
    outcomes = []
    for q, gamma, chi in configs:
        q_r, gamma_r = to_rat(q), to_rat(gamma)
        key = (q_r.numerator, q_r.denominator)
        if key not in evaluators:
            evaluators[key] = zeta_evaluator(16, 2, q_r)
        ev = evaluators[key]
        grid = tuner_grid(16, 2, chi, phase_constants(q_r).lambda_lower)
        brackets = (_zeta_cmp(ev, grid, 0, gamma_r) <= 0
                    and _zeta_cmp(ev, grid, grid.mu_max, gamma_r) >= 0)
        try:
            res = tune_rho(16, 2, q_r, gamma_r, chi, evaluator=ev)
            lo, hi = res.zeta_bounds
            assert res.window[0] <= lo and hi <= res.window[1], (q, gamma, chi)
            outcomes.append((q, gamma, chi, "tuned"))
        except NoCrossingError:
            assert not brackets, (q, gamma, chi)
            outcomes.append((q, gamma, chi, "no-crossing"))
    return {"configs": outcomes}


def check_bicolour_bounds(n_configs: int = 100, trials: int = 400, seed: int = 5):
    """Upper bounds dominate Monte Carlo frequencies."""
    rng = Xoshiro256StarStar(seed)
    seeds = splitmix64_stream(seed + 1, n_configs)
    checked = 0
    for i in range(n_configs):
        s = 1 + rng.rand_below(6)
        sizes = [1 + rng.rand_below(5) for _ in range(s)]
        nu = sum(sizes)
        nu_max = max(sizes)
        pi_hat = to_rat(1 + rng.rand_below(10)) / 40
        no_bi, some_bi = rcm.bicolour_bounds(nu, s, nu_max, pi_hat)
        f_none, f_some = rcm.bicolour_event_mc(sizes, pi_hat, trials, seeds[i])
        margin = 4 * (0.25 / trials) ** 0.5  # 4 sigma of a frequency
        assert f_none <= float(no_bi) + margin, (sizes, pi_hat, f_none, no_bi)
        assert f_some <= float(some_bi) + margin, (sizes, pi_hat, f_some, some_bi)
        checked += 1
    return {"configs": checked}
