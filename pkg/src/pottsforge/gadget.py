"""The two-clique hyperedge-simulation gadget.

A clique K of size N is wired to t terminal vertices T.  Edge
probabilities: rho inside the clique, N^(-3/4) between clique and
terminals, and 1 inside T (the joined boundary; the variant graph used in
reductions drops those T-T edges).  The component dynamic program computes
the exact weight w(t,N,k,l) of variant-edge subsets with k terminal
components and l other components; the tuner walks a geometric rho grid to
balance Pr(Y=1) against gamma * Pr(Y=t).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import mpmath

from .errors import NoCrossingError
from .graphs import WeightedGraph
from .polys import RatPoly
from .rationals import ONE, ZERO, Rat, exp_bounds, ln_bounds, to_rat


def fourth_root(n: int):
    """Integer a with a^4 == n, or None."""
    if n < 1:
        return None
    a = round(n**0.25)
    for cand in (a - 1, a, a + 1):
        if cand >= 1 and cand**4 == n:
            return cand
    return None


# -- phase constants -------------------------------------------------------------

@dataclass(frozen=True)
class PhaseConstants:
    """Critical clique density and related constants for q > 2.

    lambda_c = 2 (q-1)/(q-2) ln(q-1); delta = (q - lambda_c)/2;
    lam = lambda_c + delta; theta = (q-2)/(q-1).  The mpf fields carry
    precision_bits of working precision; the *_lower/_upper fields are
    rational bounds rounded outward, safe for exact comparisons.
    """

    q: Rat
    precision_bits: int
    lambda_c: object
    delta: object
    lam: object
    theta: Rat
    lambda_c_lower: Rat
    lambda_c_upper: Rat
    lambda_lower: Rat
    lambda_upper: Rat


def phase_constants(q, precision_bits: int = 128) -> PhaseConstants:
    q = to_rat(q)
    if q <= 2:
        raise ValueError("phase constants are defined for q > 2")
    pref = 2 * (q - 1) / (q - 2)
    ln_lo, ln_hi = ln_bounds(q - 1, precision_bits)
    lc_lo, lc_hi = pref * ln_lo, pref * ln_hi
    if not lc_hi < q:
        raise AssertionError(
            f"lambda_c >= q at q={q}: bound [{lc_lo}, {lc_hi}]"
        )
    theta = (q - 2) / (q - 1)
    lam_lo, lam_hi = (q + lc_lo) / 2, (q + lc_hi) / 2
    with mpmath.workprec(precision_bits):
        qf = mpmath.mpf(q.numerator) / mpmath.mpf(q.denominator)
        lam_c = 2 * (qf - 1) / (qf - 2) * mpmath.log(qf - 1)
        delta = (qf - lam_c) / 2
        lam = lam_c + delta
    return PhaseConstants(
        q=q,
        precision_bits=precision_bits,
        lambda_c=lam_c,
        delta=delta,
        lam=lam,
        theta=theta,
        lambda_c_lower=lc_lo,
        lambda_c_upper=lc_hi,
        lambda_lower=lam_lo,
        lambda_upper=lam_hi,
    )


# -- gadget construction -----------------------------------------------------------

def default_kt_prob(N: int) -> tuple[Rat, bool]:
    """N^(-3/4) as an exact rational when N is a fourth power, else the
    closest dyadic from below at 64 fractional bits (flagged inexact)."""
    a = fourth_root(N)
    if a is not None:
        return to_rat(1) / a**3, True
    with mpmath.workprec(192):
        v = mpmath.power(mpmath.mpf(N), mpmath.mpf(-3) / 4)
        scaled = int(mpmath.floor(v * mpmath.mpf(2) ** 64))
    return to_rat(scaled) / (1 << 64), False


@dataclass(frozen=True)
class GadgetSpec:
    """Gadget parameters plus the edge-probability map.

    Vertices 0..N-1 form the clique K, N..N+t-1 the terminals T.  Variant
    edges are ordered: all clique pairs (i<j), then clique x terminal pairs
    grouped by clique vertex.
    """

    N: int
    t: int
    rho: Rat
    kt_prob: Rat
    kt_exact: bool

    @property
    def gamma_prime(self) -> Rat:
        if self.rho == 1:
            raise ValueError("rho = 1 gives an infinite edge weight")
        return self.rho / (ONE - self.rho)

    @property
    def gamma_dblprime(self) -> Rat:
        if self.kt_prob == 1:
            raise ValueError(
                "clique-terminal probability 1 gives an infinite weight; "
                "pass an explicit kt_prob < 1"
            )
        return self.kt_prob / (ONE - self.kt_prob)

    def terminal_vertices(self) -> tuple[int, ...]:
        return tuple(range(self.N, self.N + self.t))

    def variant_edge_pairs(self) -> list[tuple[int, int]]:
        pairs = [(i, j) for i in range(self.N) for j in range(i + 1, self.N)]
        pairs += [(i, term) for i in range(self.N) for term in self.terminal_vertices()]
        return pairs

    def variant_graph(self) -> WeightedGraph:
        gp, gpp = self.gamma_prime, self.gamma_dblprime
        n_kk = comb(self.N, 2)
        pairs = self.variant_edge_pairs()
        weights = [gp] * n_kk + [gpp] * (len(pairs) - n_kk)
        return WeightedGraph.build(self.N + self.t, pairs, weights)

    def variant_probs(self) -> tuple[Rat, ...]:
        n_kk = comb(self.N, 2)
        n_kt = self.N * self.t
        return tuple([self.rho] * n_kk + [self.kt_prob] * n_kt)

    def full_graph(self):
        """Gadget with the joined terminal boundary: variant edges plus T-T
        edges at probability 1.  Returns (graph, probabilities); the graph
        weights are placeholders (samplers work from the probabilities)."""
        pairs = self.variant_edge_pairs()
        tt = [(a, b) for a in self.terminal_vertices()
              for b in self.terminal_vertices() if a < b]
        probs = list(self.variant_probs()) + [ONE] * len(tt)
        g = WeightedGraph.build(self.N + self.t, pairs + tt, 1)
        return g, tuple(probs)


def build_gadget(N: int, t: int, rho, kt_prob=None) -> GadgetSpec:
    if N < 1 or t < 1:
        raise ValueError("need N >= 1 and t >= 1")
    rho = to_rat(rho)
    if rho == 1:
        raise ValueError("rho = 1 gives an infinite edge weight")
    if not 0 <= rho < 1:
        raise ValueError(f"rho {rho} outside [0,1)")
    if kt_prob is None:
        kt, exact = default_kt_prob(N)
    else:
        kt, exact = to_rat(kt_prob), True
        if not 0 <= kt <= 1:
            raise ValueError(f"kt_prob {kt} outside [0,1]")
    return GadgetSpec(int(N), int(t), rho, kt, exact)


# -- the component dynamic program ---------------------------------------------------

@dataclass(frozen=True)
class DpTable:
    """w(t', N', k, l): total edge weight of variant-gadget subsets on t'
    terminals and N' clique vertices whose components split into k
    containing a terminal and l containing none.

    Entries cover every (t', N') <= (t, N); values are exact rationals, or
    polynomials in the clique weight when it was left symbolic.
    """

    t: int
    N: int
    gamma_prime: object
    gamma_dblprime: object
    entries: dict

    def w(self, tp: int, Np: int, k: int, ell: int):
        if k < 0 or ell < 0:
            return ZERO
        if tp < 0 or Np < 0 or tp > self.t or Np > self.N:
            raise KeyError((tp, Np, k, ell))
        if k > tp or ell > Np:
            return ZERO
        return self.entries[(tp, Np, k, ell)]

    def rows(self):
        for key in sorted(self.entries):
            yield key, self.entries[key]


def dp_weights(t: int, N: int, gamma_prime, gamma_dblprime) -> DpTable:
    """Fill the w table bottom-up.

    The recurrence splits each subset by the component of a distinguished
    clique vertex; the two k+l == 1 entries come from complementing the
    total weight (1+gamma')^C(N',2) (1+gamma'')^(N' t').  gamma_prime may
    be a RatPoly to keep the table symbolic in the clique weight.
    """
    if t < 0 or N < 0:
        raise ValueError("negative gadget dimensions")
    symbolic = isinstance(gamma_prime, RatPoly) or isinstance(gamma_dblprime, RatPoly)
    if symbolic:
        gp = gamma_prime if isinstance(gamma_prime, RatPoly) else RatPoly.const(gamma_prime)
        gpp = gamma_dblprime if isinstance(gamma_dblprime, RatPoly) else RatPoly.const(gamma_dblprime)
        zero, one = RatPoly(), RatPoly.const(1)
    else:
        gp, gpp = to_rat(gamma_prime), to_rat(gamma_dblprime)
        zero, one = ZERO, ONE

    w: dict = {}

    def get(tp, Np, k, ell):
        if k < 0 or ell < 0 or k > tp or ell > Np:
            return zero
        return w[(tp, Np, k, ell)]

    for s in range(t + N + 1):
        for tp in range(min(t, s) + 1):
            Np = s - tp
            if Np > N:
                continue
            if Np == 0:
                for k in range(tp + 1):
                    w[(tp, 0, k, 0)] = one if k == tp else zero
                continue
            for k in range(tp + 1):
                for ell in range(Np + 1):
                    if k + ell <= 1:
                        continue
                    acc = zero
                    for i in range(1, tp + 1):
                        for j in range(1, Np + 1):
                            f2 = get(tp - i, Np - j, k - 1, ell)
                            if f2 == 0:
                                continue
                            f1 = get(i, j, 1, 0)
                            if f1 == 0:
                                continue
                            acc = acc + comb(tp, i) * comb(Np - 1, j - 1) * (f1 * f2)
                    for j in range(1, Np + 1):
                        f2 = get(tp, Np - j, k, ell - 1)
                        if f2 == 0:
                            continue
                        f1 = get(0, j, 0, 1)
                        if f1 == 0:
                            continue
                        acc = acc + comb(Np - 1, j - 1) * (f1 * f2)
                    w[(tp, Np, k, ell)] = acc
            total = (one + gp) ** comb(Np, 2) * (one + gpp) ** (Np * tp)
            acc = zero
            for k in range(tp + 1):
                for ell in range(Np + 1):
                    if k + ell > 1:
                        acc = acc + w[(tp, Np, k, ell)]
            if tp > 0:
                w[(tp, Np, 1, 0)] = total - acc
                w[(tp, Np, 0, 0)] = zero
                if Np >= 1:
                    w[(tp, Np, 0, 1)] = zero
            else:
                w[(0, Np, 0, 1)] = total - acc
                w[(0, Np, 0, 0)] = zero

    return DpTable(t=t, N=N, gamma_prime=gp, gamma_dblprime=gpp, entries=w)


@dataclass(frozen=True)
class GadgetSummary:
    """Z^k values at a fixed q, with the balance ratios."""

    z: dict
    psi: Rat
    zeta: Rat

    @property
    def z_total(self):
        return sum(self.z.values(), ZERO)


def z_k(table: DpTable, q_hat) -> GadgetSummary:
    """Z^k = sum_l w(t,N,k,l) q^l for k in [t], from a concrete table."""
    q = to_rat(q_hat)
    t, N = table.t, table.N
    if t < 1:
        raise ValueError("need at least one terminal")
    qpow = [ONE]
    for _ in range(N):
        qpow.append(qpow[-1] * q)
    z = {}
    for k in range(1, t + 1):
        acc = ZERO
        for ell in range(N + 1):
            acc += table.w(t, N, k, ell) * qpow[ell]
        z[k] = acc
    if z[1] == 0 or z[t] == 0:
        raise ValueError("degenerate gadget: Z^1 or Z^t vanishes")
    psi = z[t] / z[1]
    zeta = z[1] / z[t]
    assert psi * zeta == 1
    return GadgetSummary(z=z, psi=psi, zeta=zeta)


def z_by_partition(spec: GadgetSpec, q, max_edges=None) -> dict:
    """Variant-gadget contribution Z(pi) for every partition pi of the
    terminals: sum over edge subsets inducing pi of gamma(A) q^kappa',
    where kappa' counts the terminal-free components.

    Computed by direct subset enumeration with an incremental union-find,
    independent of the dynamic program (summing over partitions with k
    blocks must reproduce the DP's Z^k)."""
    from .exact import enumeration_cap
    from .graphs import Partition

    q = to_rat(q)
    g = spec.variant_graph()
    cap = enumeration_cap(max_edges)
    if g.m > cap:
        raise ValueError(f"gadget too large to enumerate: {g.m} edges, cap {cap}")
    n, m = g.n, g.m
    N, t = spec.N, spec.t
    terminals = spec.terminal_vertices()
    eu = [e[0] for e in g.edges]
    ev = [e[1] for e in g.edges]
    n_kk = comb(N, 2)

    parent = list(range(n))
    size = [1] * n

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    counts: dict = {}

    def rec(i, comps, a, b):
        if i == m:
            roots = {}
            pattern = []
            for v in terminals:
                r = find(v)
                pattern.append(roots.setdefault(r, len(roots)))
            kprime = comps - len(roots)
            key = (tuple(pattern), kprime, a, b)
            counts[key] = counts.get(key, 0) + 1
            return
        rec(i + 1, comps, a, b)
        ru, rv = find(eu[i]), find(ev[i])
        a2, b2 = (a + 1, b) if i < n_kk else (a, b + 1)
        if ru == rv:
            rec(i + 1, comps, a2, b2)
        else:
            if size[ru] < size[rv]:
                ru, rv = rv, ru
            parent[rv] = ru
            size[ru] += size[rv]
            rec(i + 1, comps - 1, a2, b2)
            parent[rv] = rv
            size[ru] -= size[rv]

    rec(0, n, 0, 0)

    gp, gpp = spec.gamma_prime, spec.gamma_dblprime
    gp_pow = [ONE]
    for _ in range(n_kk):
        gp_pow.append(gp_pow[-1] * gp)
    gpp_pow = [ONE]
    for _ in range(N * t):
        gpp_pow.append(gpp_pow[-1] * gpp)
    qpow = [ONE]
    for _ in range(n):
        qpow.append(qpow[-1] * q)

    out: dict = {}
    for (pattern, kprime, a, b), c in counts.items():
        blocks: dict = {}
        for idx, blk in enumerate(pattern):
            blocks.setdefault(blk, []).append(idx)
        part = Partition.of(blocks.values(), ground=range(t))
        val = c * gp_pow[a] * gpp_pow[b] * qpow[kprime]
        out[part] = out.get(part, ZERO) + val
    return out


# -- exact zeta evaluation along the tuner grid ----------------------------------------

def _iv_from_rat(ctx, x: Rat):
    x = to_rat(x)
    return ctx.mpf(int(x.numerator)) / ctx.mpf(int(x.denominator))


def _iv_bounds(x) -> tuple[Rat, Rat]:
    from .rationals import rat_from_mpf_tuple

    lo_raw, hi_raw = x._mpi_
    return rat_from_mpf_tuple(lo_raw), rat_from_mpf_tuple(hi_raw)


@dataclass(frozen=True)
class ZetaEvaluator:
    """Z^1 and Z^t as polynomials in the clique weight gamma'.

    Built once per (t, N, q); evaluating a grid point is two Horner
    evaluations instead of a fresh dynamic program.  Exact rational
    evaluation is available always; certified interval bounds at a chosen
    precision make dense tuner grids affordable (grid points deep in the
    geometric ladder are rationals with megabit numerators).
    """

    N: int
    t: int
    q: Rat
    kt_prob: Rat
    z_polys: dict

    def z_values(self, rho) -> dict:
        rho = to_rat(rho)
        gp = rho / (ONE - rho)
        return {k: poly(gp) for k, poly in self.z_polys.items()}

    def zeta(self, rho) -> Rat:
        zv = self.z_values(rho)
        return zv[1] / zv[self.t]

    def psi(self, rho) -> Rat:
        return ONE / self.zeta(rho)

    def zeta_bounds(self, rho_base: Rat, rho_factor: Rat, mu: int,
                    prec: int) -> tuple[Rat, Rat]:
        """Certified enclosure of zeta(rho_base * rho_factor^mu) at ~prec
        bits, without materialising the full-size rational grid point."""
        iv = mpmath.iv
        old = iv.prec
        try:
            iv.prec = prec
            rho = _iv_from_rat(iv, rho_base) * _iv_from_rat(iv, rho_factor) ** mu
            gp = rho / (1 - rho)
            vals = {}
            for k, poly in self.z_polys.items():
                acc = iv.mpf(0)
                for coef in reversed(poly.c):
                    acc = acc * gp + _iv_from_rat(iv, coef)
                vals[k] = acc
            zeta = vals[1] / vals[self.t]
        finally:
            iv.prec = old
        return _iv_bounds(zeta)


def zeta_evaluator(N: int, t: int, q, kt_prob=None) -> ZetaEvaluator:
    q = to_rat(q)
    if t < 2:
        raise ValueError("balance ratio needs t >= 2")
    if kt_prob is None:
        kt, _ = default_kt_prob(N)
    else:
        kt = to_rat(kt_prob)
    if kt >= 1:
        raise ValueError("clique-terminal probability must be < 1")
    gpp = kt / (ONE - kt)
    table = dp_weights(t, N, RatPoly.x(), gpp)
    qpow = [ONE]
    for _ in range(N):
        qpow.append(qpow[-1] * q)
    z_polys = {}
    for k in (1, t):
        acc = RatPoly()
        for ell in range(N + 1):
            acc = acc + table.w(t, N, k, ell) * qpow[ell]
        z_polys[k] = acc
    return ZetaEvaluator(N=N, t=t, q=q, kt_prob=kt, z_polys=z_polys)


# -- the tuner ---------------------------------------------------------------------

@dataclass(frozen=True)
class TunerGrid:
    """Geometric grid rho_mu = N^-3 (1+delta)^mu clamped to [N^-3, lam/N]."""

    rho_lo: Rat
    one_plus_delta: Rat
    mu_max: int

    def rho(self, mu: int) -> Rat:
        if not 0 <= mu <= self.mu_max:
            raise IndexError(mu)
        return self.rho_lo * self.one_plus_delta**mu

    @property
    def size(self) -> int:
        return self.mu_max + 1


def tuner_grid(N: int, t: int, chi, lam_lower: Rat) -> TunerGrid:
    chi = to_rat(chi)
    if chi <= 0:
        raise ValueError("chi must be positive")
    n = N + t
    m = comb(N, 2) + N * t
    delta = chi / (16 * (n + m))
    rho_lo = to_rat(1) / N**3
    rho_hi = to_rat(lam_lower) / N
    if rho_lo > rho_hi:
        raise NoCrossingError(
            f"empty grid: N^-3 = {rho_lo} exceeds lambda/N = {rho_hi}"
        )
    opd = 1 + delta
    ratio = rho_hi / rho_lo
    with mpmath.workprec(128):
        est = int(mpmath.log(mpmath.mpf(ratio.numerator) / mpmath.mpf(ratio.denominator))
                  / mpmath.log(mpmath.mpf(opd.numerator) / mpmath.mpf(opd.denominator)))
    est = max(est, 0)
    val = opd**est
    while val > ratio and est > 0:
        est -= 1
        val = val / opd
    while val * opd <= ratio:
        est += 1
        val = val * opd
    return TunerGrid(rho_lo=rho_lo, one_plus_delta=opd, mu_max=est)


@dataclass(frozen=True)
class TuneResult:
    rho: Rat
    zeta: Rat | None
    zeta_bounds: tuple
    zeta_exact: bool
    mu: int
    grid_points: int
    window: tuple
    evaluations: int
    endpoint_bounds: tuple
    below_asymptotic_n: bool

    @property
    def psi(self):
        return ONE / self.zeta if self.zeta_exact else None


# exact evaluation is used when the grid point's numerator stays below this
# many bits after raising to the polynomial degree
_EXACT_EVAL_BIT_BUDGET = 1 << 21
_MAX_INTERVAL_PREC = 1 << 14


def tune_rho(N: int, t: int, q, gamma, chi, *, n0: int = 0,
             precision_bits: int = 128, evaluator: ZetaEvaluator | None = None) -> TuneResult:
    """Find the first grid point whose exact balance ratio zeta = Z^1/Z^t
    lies in [e^(-chi/2) gamma, e^(chi/2) gamma].

    zeta is non-decreasing in rho (domination in the clique probability),
    so a binary search for the first point at or above the lower window
    edge returns the same point a left-to-right scan would.  Window edges
    are rational bounds rounded inward, so acceptance certifies the true
    sandwich.  Comparisons refine certified interval enclosures until they
    decide, falling back to full rational evaluation only on (measure-zero)
    exact ties, so every decision equals the all-rational computation's.
    Raises NoCrossingError, with both endpoint ratios attached, when no
    grid point qualifies; expected whenever N is far below the regime
    where the crossing is guaranteed.
    """
    q, gamma, chi = to_rat(q), to_rat(gamma), to_rat(chi)
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if chi <= 0:
        raise ValueError("chi must be positive")
    if t < 2:
        raise ValueError("tuner needs t >= 2")
    a = fourth_root(N)
    if a is None:
        raise ValueError("tuner requires N^(1/4) to be an integer")
    if a < 2:
        raise ValueError("need N >= 16 so the clique-terminal weight is finite")

    phase = phase_constants(q, precision_bits)
    grid = tuner_grid(N, t, chi, phase.lambda_lower)
    if evaluator is None:
        evaluator = zeta_evaluator(N, t, q)

    win_lo = gamma * exp_bounds(-chi / 2, precision_bits)[1]
    win_hi = gamma * exp_bounds(chi / 2, precision_bits)[0]

    evals = 0
    opd_bits = grid.one_plus_delta.numerator.bit_length()
    degree = max(p.degree for p in evaluator.z_polys.values())

    def exact_affordable(mu: int) -> bool:
        return mu * opd_bits * (degree + 1) <= _EXACT_EVAL_BIT_BUDGET

    def compare(mu: int, threshold: Rat) -> int:
        """Sign of zeta(rho_mu) - threshold, decided exactly."""
        nonlocal evals
        evals += 1
        if exact_affordable(mu):
            z = evaluator.zeta(grid.rho(mu))
            return -1 if z < threshold else (1 if z > threshold else 0)
        prec = 192
        while prec <= _MAX_INTERVAL_PREC:
            lo, hi = evaluator.zeta_bounds(grid.rho_lo, grid.one_plus_delta, mu, prec)
            if hi < threshold:
                return -1
            if lo > threshold:
                return 1
            prec *= 2
        z = evaluator.zeta(grid.rho(mu))
        return -1 if z < threshold else (1 if z > threshold else 0)

    def zeta_report(mu: int):
        """(exact zeta or None, certified bounds) for reporting."""
        if exact_affordable(mu):
            z = evaluator.zeta(grid.rho(mu))
            return z, (z, z)
        return None, evaluator.zeta_bounds(grid.rho_lo, grid.one_plus_delta, mu, 320)

    below = N < max(t**16, n0)
    zl_exact, zl_bounds = zeta_report(0)
    zh_exact, zh_bounds = zeta_report(grid.mu_max)

    def no_crossing(reason: str):
        return NoCrossingError(
            f"{reason}: zeta(rho={grid.rho(0)}) in {zl_bounds}, "
            f"zeta at top of grid in {zh_bounds}, window [{win_lo}, {win_hi}]"
            + ("; N is below the asymptotic regime" if below else ""),
            rho_lo=grid.rho(0), zeta_lo=zl_exact or zl_bounds,
            rho_hi=grid.rho(grid.mu_max), zeta_hi=zh_exact or zh_bounds,
            window=(win_lo, win_hi), grid_points=grid.size,
        )

    if compare(grid.mu_max, win_lo) < 0:
        raise no_crossing("whole grid below window")
    if compare(0, win_hi) > 0:
        raise no_crossing("whole grid above window")

    # first mu with zeta >= win_lo (zeta non-decreasing along the grid)
    if compare(0, win_lo) >= 0:
        first = 0
    else:
        lo_mu, hi_mu = 0, grid.mu_max
        while hi_mu - lo_mu > 1:
            mid = (lo_mu + hi_mu) // 2
            if compare(mid, win_lo) >= 0:
                hi_mu = mid
            else:
                lo_mu = mid
        first = hi_mu
    if compare(first, win_hi) > 0:
        raise no_crossing(
            f"grid jumps over window between mu={first - 1} and mu={first}"
        )
    z_exact, z_bounds = zeta_report(first)
    return TuneResult(
        rho=grid.rho(first),
        zeta=z_exact,
        zeta_bounds=z_bounds,
        zeta_exact=z_exact is not None,
        mu=first,
        grid_points=grid.size,
        window=(win_lo, win_hi),
        evaluations=evals,
        endpoint_bounds=(zl_bounds, zh_bounds),
        below_asymptotic_n=below,
    )
