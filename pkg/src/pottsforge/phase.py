"""First-order phase transition demonstration on the complete graph.

Sweeps the clique density lambda (edge probability lambda/N) across the
critical value and records the largest-component fraction per heat-bath
sweep, from both the empty and the full initial state.  First-order
behaviour shows up as a jump across theta = (q-2)/(q-1), with hysteresis
between the two starts; mixing at the transition itself is not guaranteed
(that slowness is the point of the construction), so this is a report
artifact rather than a pass/fail check.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .gadget import phase_constants
from .graphs import WeightedGraph
from .randomcluster import NO_CONDITIONING, RCModel, run_chain
from .rationals import Rat, rat_str, to_rat
from .rng import splitmix64_stream


def complete_graph(n: int) -> WeightedGraph:
    return WeightedGraph.build(
        n, [(i, j) for i in range(n) for j in range(i + 1, n)], 1
    )


def default_lambda_grid(q, points: int = 7, spread=("7/10", "13/10")) -> list[Rat]:
    """Rationals spanning [lo, hi] * lambda_c, rounded to 3 decimals."""
    pc = phase_constants(q)
    lam_c = (pc.lambda_c_lower + pc.lambda_c_upper) / 2
    lo = to_rat(spread[0]) * lam_c
    hi = to_rat(spread[1]) * lam_c
    out = []
    for i in range(points):
        lam = lo + (hi - lo) * i / max(points - 1, 1)
        out.append(to_rat(round(float(lam.numerator) / float(lam.denominator), 3)
                          .__str__()))
    return out


@dataclass(frozen=True)
class PhaseRow:
    lam: Rat
    start: str
    sweep: int
    largest: int
    fraction: float


def _run_one(args):
    q_s, n, lam_s, sweeps, seed, start = args
    q = to_rat(q_s)
    lam = to_rat(lam_s)
    g = complete_graph(n)
    p = lam / n
    if p > 1:
        raise ValueError(f"lambda {lam} exceeds N")
    initial = frozenset(range(g.m)) if start == "full" else frozenset()
    _, largest = run_chain(g, RCModel(q), p, NO_CONDITIONING, sweeps * g.m,
                           seed, initial=initial, record_mode=2, rec_a=g.m)
    return [
        PhaseRow(lam=lam, start=start, sweep=i + 1, largest=int(x),
                 fraction=int(x) / n)
        for i, x in enumerate(largest)
    ]


def phase_sweep(q, n: int, sweeps: int, seed: int, lambdas=None,
                starts=("empty", "full"), jobs: int = 1) -> list[PhaseRow]:
    """Largest-component traces for every (lambda, start) pair."""
    q = to_rat(q)
    if lambdas is None:
        lambdas = default_lambda_grid(q)
    lambdas = [to_rat(x) for x in lambdas]
    tasks = []
    seeds = splitmix64_stream(seed, len(lambdas) * len(starts))
    i = 0
    for lam in lambdas:
        for start in starts:
            tasks.append((rat_str(q), n, rat_str(lam), sweeps, seeds[i], start))
            i += 1
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_one, tasks))
    else:
        chunks = [_run_one(t) for t in tasks]
    rows: list[PhaseRow] = []
    for chunk in chunks:
        rows.extend(chunk)
    return rows


def rows_to_csv(rows) -> str:
    lines = ["lambda,start,sweep,largest_component,fraction"]
    for r in rows:
        lines.append(f"{rat_str(r.lam)},{r.start},{r.sweep},{r.largest},{r.fraction:.6f}")
    return "\n".join(lines) + "\n"


def jump_summary(rows, q) -> dict:
    """Per-start final fractions by lambda, and whether the sweep crosses
    theta = (q-2)/(q-1)."""
    q = to_rat(q)
    theta = float((q - 2) / (q - 1))
    finals: dict = {}
    for r in rows:
        key = (r.start, rat_str(r.lam))
        cur = finals.get(key)
        if cur is None or r.sweep > cur[0]:
            finals[key] = (r.sweep, r.fraction)
    out: dict = {"theta": theta, "finals": {}, "jump": {}}
    starts = sorted({k[0] for k in finals})
    for start in starts:
        series = sorted(
            ((to_rat(lam), frac) for (s, lam), (_, frac) in finals.items()
             if s == start),
            key=lambda kv: kv[0],
        )
        out["finals"][start] = [(rat_str(lam), frac) for lam, frac in series]
        below = any(frac < theta for _, frac in series)
        above = any(frac >= theta for _, frac in series)
        out["jump"][start] = below and above
    return out
