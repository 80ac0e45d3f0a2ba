import math
from fractions import Fraction

import pytest

from pottsforge import exact
from pottsforge import randomcluster as rcm
from pottsforge.errors import CouplingViolationError
from pottsforge.graphs import WeightedGraph
from pottsforge.rationals import ONE, to_rat
from pottsforge.rng import Xoshiro256StarStar


def triangle():
    return WeightedGraph.build(3, [(0, 1), (1, 2), (0, 2)], 1)


class TestRcWeight:
    def test_spec_examples(self):
        g = WeightedGraph.build(2, [(0, 1)], 1)
        assert rcm.rc_weight(g, [], 2, "1/2") == 2
        # p(e)=1 everywhere: only the full subset has weight
        tri = triangle()
        assert rcm.rc_weight(tri, [0, 1], 2, 1) == 0
        assert rcm.rc_weight(tri, [0, 1, 2], 2, 1) == 2

    def test_partition_function_identity(self, rnd):
        # sum_A P~ = Z_Tutte * prod(1-p) with gamma = p/(1-p)
        import itertools

        for _ in range(15):
            n = rnd.randint(2, 4)
            edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                     if rnd.random() < 0.7]
            if not edges:
                continue
            g = WeightedGraph.build(
                n, edges,
                [to_rat(rnd.randint(1, 4)) / rnd.randint(5, 9) for _ in edges])
            p = rcm.probs_from_weights(g)
            q = to_rat(rnd.randint(1, 4))
            z_rc = to_rat(0)
            for r in range(g.m + 1):
                for sub in itertools.combinations(range(g.m), r):
                    z_rc += rcm.rc_weight(g, sub, q, p)
            prod = ONE
            for pe in p:
                prod *= ONE - pe
            assert z_rc == exact.tutte_graph(g, q) * prod


class TestConditioning:
    def test_invariants(self):
        with pytest.raises(ValueError):
            rcm.Conditioning(frozenset({0}), frozenset({0}))
        g = WeightedGraph.build(2, [(0, 1), (0, 1)], 1)
        cond = rcm.Conditioning(frozenset({0}), frozenset())
        cond.validate(g, rcm.normalize_probs(g, "1/2"))
        bad = rcm.Conditioning(frozenset({0}), frozenset())
        with pytest.raises(ValueError):
            bad.validate(g, rcm.normalize_probs(g, 0))

    def test_respected_during_run(self):
        g = triangle()
        cond = rcm.Conditioning(frozenset({0}), frozenset({2}))
        for seed in range(5):
            st, _ = rcm.run_chain(g, rcm.RCModel(to_rat(2)), "1/2", cond,
                                  200, seed)
            assert 0 in st.edges and 2 not in st.edges


class TestHeatBathStep:
    def test_p_zero_never_enters(self):
        g = WeightedGraph.build(2, [(0, 1)], 1)
        rng = Xoshiro256StarStar(3)
        st = rcm.ChainState(frozenset())
        for _ in range(50):
            st = rcm.heat_bath_step(g, st, rcm.RCModel(to_rat(2)), 0,
                                    rcm.NO_CONDITIONING, rng)
        assert st.edges == frozenset()

    def test_disconnected_inclusion_probability(self):
        # p=1/2, q=2, endpoints disconnected -> conditional prob 1/3
        model = rcm.RCModel(to_rat(2))
        same, diff = model.conditional_probs(to_rat("1/2"))
        assert same == to_rat("1/2")
        assert diff == to_rat("1/3")

    def test_no_free_edges_is_identity(self):
        g = WeightedGraph.build(2, [(0, 1)], 1)
        cond = rcm.Conditioning(frozenset({0}), frozenset())
        rng = Xoshiro256StarStar(3)
        st = rcm.ChainState(frozenset({0}))
        st2 = rcm.heat_bath_step(g, st, rcm.RCModel(to_rat(2)), "1/2", cond, rng)
        assert st2.edges == st.edges

    def test_reference_matches_kernel(self):
        g = WeightedGraph.build(4, [(0, 1), (1, 2), (2, 3), (0, 3)], 1)
        model = rcm.RCModel(to_rat("5/2"))
        p = ["1/3", "2/5", "9/10", "1/7"]
        cond = rcm.Conditioning(frozenset({1}), frozenset())
        steps, seed = 400, 99
        st_kernel, _ = rcm.run_chain(g, model, p, cond, steps, seed)
        rng = Xoshiro256StarStar(seed)
        st = rcm.ChainState(frozenset({1}))
        for _ in range(steps):
            st = rcm.heat_bath_step(g, st, model, p, cond, rng)
        assert st.edges == st_kernel.edges


class TestSampling:
    def test_deterministic_for_seed(self):
        g = triangle()
        a = rcm.sample_rc(g, 2, "1/2", sweeps=10, seed=5)
        b = rcm.sample_rc(g, 2, "1/2", sweeps=10, seed=5)
        assert a == b
        c = rcm.sample_rc(g, 2, "1/2", sweeps=10, seed=6)
        # different seed almost surely differs at some point; just check type
        assert isinstance(c, frozenset)

    def test_sweeps_validation(self):
        with pytest.raises(ValueError):
            rcm.sample_rc(triangle(), 2, "1/2", sweeps=0)

    def test_er_marginals(self):
        g = WeightedGraph.build(3, [(0, 1), (1, 2)], 1)
        _, visits = rcm.run_chain(g, rcm.ERModel(), ["1/4", "3/4"],
                                  rcm.NO_CONDITIONING, 200_000, 3,
                                  record_mode=1, rec_a=1000, rec_b=1)
        tot = int(visits.sum())
        expected = {0: Fraction(3, 16), 1: Fraction(1, 16),
                    2: Fraction(9, 16), 3: Fraction(3, 16)}
        for mask, pr in expected.items():
            assert abs(int(visits[mask]) / tot - float(pr)) < 0.01

    def test_stationarity_small(self):
        g = WeightedGraph.build(3, [(0, 1), (1, 2)], 1)
        law = rcm.rc_distribution(g, "5/2", ["1/2", "1/3"])
        _, visits = rcm.run_chain(g, rcm.RCModel(to_rat("5/2")),
                                  ["1/2", "1/3"], rcm.NO_CONDITIONING,
                                  400_000, 11, record_mode=1,
                                  rec_a=2000, rec_b=4)
        tot = int(visits.sum())
        for sub, pr in law.items():
            mask = sum(1 << e for e in sub)
            got = int(visits[mask]) / tot
            want = float(Fraction(pr.numerator, pr.denominator))
            sigma = math.sqrt(want * (1 - want) / tot)
            assert abs(got - want) < 6 * sigma + 1e-4


class TestCouplings:
    def test_q1_er_equals_rc(self):
        g = triangle()
        cs = rcm.run_coupled(g, "er-over-rc", 1, "1/2", rcm.NO_CONDITIONING,
                             3000, 17)
        assert cs.lower.edges == cs.upper.edges

    def test_monotone_p_equal_maps_identical(self):
        g = triangle()
        cs = rcm.run_coupled(g, "rc-monotone-p", 3, "1/3",
                             rcm.NO_CONDITIONING, 3000, 21,
                             p_prime="1/3")
        assert cs.lower.edges == cs.upper.edges

    def test_containment_all_kinds(self, rnd):
        for kind in rcm.COUPLING_KINDS:
            for seed in (1, 2, 3):
                n = 8
                edges = [(u, v) for u in range(n) for v in range(u + 1, n)
                         if rnd.random() < 0.4] or [(0, 1)]
                g = WeightedGraph.build(n, edges, 1)
                pp = "3/4" if kind == "rc-monotone-p" else None
                cs = rcm.run_coupled(g, kind, "5/2", "2/5",
                                     rcm.NO_CONDITIONING, 5000, seed,
                                     p_prime=pp)
                assert cs.lower.edges <= cs.upper.edges

    def test_invalid_inputs(self):
        g = triangle()
        with pytest.raises(ValueError):
            rcm.run_coupled(g, "rc-monotone-p", 3, "1/2",
                            rcm.NO_CONDITIONING, 10, 1, p_prime="1/3")
        with pytest.raises(ValueError):
            rcm.run_coupled(g, "er-over-rc", "1/2", "1/2",
                            rcm.NO_CONDITIONING, 10, 1)
        with pytest.raises(ValueError):
            rcm.coupling_legs("bogus", 3, ("1/2",))

    def test_containment_violation_detected(self):
        with pytest.raises(CouplingViolationError):
            rcm.CoupledState(rcm.ChainState(frozenset({0})),
                             rcm.ChainState(frozenset()))

    def test_coupled_step_reference(self):
        g = triangle()
        rng = Xoshiro256StarStar(8)
        cs = rcm.CoupledState(rcm.ChainState(frozenset()),
                              rcm.ChainState(frozenset()))
        for _ in range(300):
            cs = rcm.coupled_step(g, cs, "er-over-rc", 3, "1/2",
                                  rcm.NO_CONDITIONING, rng)
            assert cs.lower.edges <= cs.upper.edges


class TestRedGreen:
    def test_trivial_r(self):
        g = triangle()
        rng = Xoshiro256StarStar(5)
        red_v, red_e, green_e = rcm.red_green_split(g, [0, 1], 1, rng)
        assert red_v == frozenset(range(3))
        assert red_e == frozenset({0, 1}) and green_e == frozenset()
        red_v, red_e, green_e = rcm.red_green_split(g, [0, 1], 0, rng)
        assert red_v == frozenset() and red_e == frozenset()

    def test_fundamental_lemma_exact(self):
        g = WeightedGraph.build(3, [(0, 1), (1, 2), (0, 2)], 1)
        checked = rcm.fundamental_lemma_check(g, 2, ["1/2", "1/3", "1/4"], "1/2")
        assert checked > 0
        g2 = WeightedGraph.build(4, [(0, 1), (2, 3)], 1)
        assert rcm.fundamental_lemma_check(g2, 3, ["1/2", "2/3"], "1/3") > 0


class TestBicolourBounds:
    def test_zero_probability(self):
        no_bi, some_bi = rcm.bicolour_bounds(10, 2, 5, 0)
        assert float(no_bi) == 1.0 and float(some_bi) == 0.0

    def test_monotonicity_claims(self):
        # first bound increases with s and decreases with nu
        pi = to_rat("1/20")
        vals_s = [rcm.bicolour_bounds(60, s, 60, pi)[0] for s in (1, 2, 3, 5, 6)]
        assert all(a <= b for a, b in zip(vals_s, vals_s[1:]))
        vals_nu = [rcm.bicolour_bounds(nu, 5, nu, pi)[0]
                   for nu in (10, 20, 40, 80)]
        assert all(a >= b for a, b in zip(vals_nu, vals_nu[1:]))
        # second bound increases in nu and nu_max
        vals2 = [rcm.bicolour_bounds(nu, 5, 5, pi)[1] for nu in (10, 20, 40)]
        assert all(a <= b for a, b in zip(vals2, vals2[1:]))

    def test_dominates_monte_carlo(self):
        sizes = [10, 10, 10, 10, 10, 10, 10, 10, 10, 10]
        pi = to_rat("1/20")
        no_bi, some_bi = rcm.bicolour_bounds(100, 10, 10, pi)
        f_none, f_some = rcm.bicolour_event_mc(sizes, pi, 4000, 3)
        assert f_none <= float(no_bi) + 0.03
        assert f_some <= float(some_bi) + 0.03

    def test_validation(self):
        with pytest.raises(ValueError):
            rcm.bicolour_bounds(5, 10, 2, "1/2")
