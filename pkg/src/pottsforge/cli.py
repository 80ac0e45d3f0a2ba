"""Command-line interface.

Subcommands: eval, sample, tune, reduce, verify, demo, gadget.  Reports go
to stdout (byte-identical for identical argv and seed); diagnostics and
timing go to stderr.  Exit codes: 0 success, 1 usage error, 2 enumeration
cap exceeded or tuner NoCrossing.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__, backend, exact
from . import randomcluster as rcm
from . import reductions as red
from .errors import EnumerationCapError, NoCrossingError
from .gadget import dp_weights, tune_rho
from .graphs import (
    BipartiteGraph,
    FormatError,
    WeightedGraph,
    WeightedHypergraph,
    parse_instance,
    serialize_instance,
)
from .rationals import Rat, rat_decimal, rat_str, to_rat


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _rat(text: str) -> Rat:
    try:
        return to_rat(text)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"not a rational: {text!r} ({exc})") from exc


def _load(path: str):
    try:
        return parse_instance(Path(path).read_text())
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from exc
    except FormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _value_payload(value: Rat) -> dict:
    return {
        "value_num": str(value.numerator),
        "value_den": str(value.denominator),
        "value_decimal": rat_decimal(value),
    }


def _emit_value(value: Rat, as_json: bool):
    if as_json:
        print(json.dumps(_value_payload(value)))
    else:
        print(f"{rat_str(value)} ({rat_decimal(value)})")


def build_parser() -> _Parser:
    p = _Parser(prog="pottsforge", description=__doc__)
    p.add_argument("--version", action="store_true", help="print version and exit")
    sub = p.add_subparsers(dest="command")

    pe = sub.add_parser("eval", help="exact partition-function values")
    pe.add_argument("instance", help="instance file (graph/hypergraph/bipartite)")
    pe.add_argument("--q", type=_rat, help="rational q for Tutte evaluation")
    pe.add_argument("--mu", type=_rat, help="rational mu for bipartite Z_IS")
    pe.add_argument("--potts", action="store_true",
                    help="evaluate the Potts form (integer q) instead of Tutte")
    pe.add_argument("--terminals", metavar="S,T",
                    help="also print the two-terminal split Z_st / Z_s|t")
    pe.add_argument("--max-edges", type=int, default=None,
                    help="override the enumeration cap")
    pe.add_argument("--json", action="store_true")

    ps = sub.add_parser("sample", help="heat-bath sampling")
    ps.add_argument("instance")
    ps.add_argument("--model", choices=("rc", "er"), default="rc")
    ps.add_argument("--q", type=_rat, default=to_rat(2))
    ps.add_argument("--sweeps", type=int, default=1)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--force-in", default="", metavar="IDS",
                    help="comma-separated edge ids forced present")
    ps.add_argument("--force-out", default="", metavar="IDS")
    ps.add_argument("--trace", choices=("csv",), default=None,
                    help="stream per-sweep largest-component size as CSV")
    ps.add_argument("--json", action="store_true")

    pt = sub.add_parser("tune", help="gadget critical-probability tuner")
    pt.add_argument("--N", type=int, required=True)
    pt.add_argument("--t", type=int, required=True)
    pt.add_argument("--q", type=_rat, required=True)
    pt.add_argument("--gamma", type=_rat, required=True)
    pt.add_argument("--chi", type=_rat, required=True)
    pt.add_argument("--n0", type=int, default=0)
    pt.add_argument("--json", action="store_true")

    pr = sub.add_parser("reduce", help="run the reduction pipeline")
    pr.add_argument("instance", help="bipartite instance file")
    pr.add_argument("--from", dest="src", choices=("bis",), default="bis")
    pr.add_argument("--to", dest="dst", choices=("tutte",), default="tutte")
    pr.add_argument("--q", type=_rat, required=True)
    pr.add_argument("--gamma", type=_rat, required=True)
    pr.add_argument("--eps", type=_rat, required=True)
    pr.add_argument("--force-N", type=int, default=None)
    pr.add_argument("--out-dir", default=None,
                    help="write each stage's instance file here")

    pv = sub.add_parser("verify", help="replay exact identity suites")
    pv.add_argument("suite", nargs="?", default="all",
                    choices=("all", "fk", "dp", "wiring", "couplings", "fl",
                             "stationarity", "apex", "decomposition", "sp",
                             "ising3", "implement", "tuner", "bicolour",
                             "roundtrip"))
    pv.add_argument("--max-n", type=int, default=4,
                    help="vertex bound for the fk sweep")

    pd = sub.add_parser("demo", help="report-artifact demonstrations")
    pd.add_argument("kind", choices=("phase",))
    pd.add_argument("--q", type=_rat, default=to_rat(10))
    pd.add_argument("--N", type=int, default=500)
    pd.add_argument("--sweeps", type=int, default=2000)
    pd.add_argument("--seed", type=int, default=7)
    pd.add_argument("--lambdas", default=None,
                    help="comma-separated rational lambda values")
    pd.add_argument("--starts", default="empty,full")
    pd.add_argument("--jobs", type=int, default=1)
    pd.add_argument("--out", default=None, help="CSV path (default stdout)")

    pg = sub.add_parser("gadget", help="gadget table utilities")
    gsub = pg.add_subparsers(dest="gadget_command")
    pdp = gsub.add_parser("dump-dp", help="emit the component DP table as CSV")
    pdp.add_argument("--t", type=int, required=True)
    pdp.add_argument("--N", type=int, required=True)
    pdp.add_argument("--gamma-prime", type=_rat, required=True)
    pdp.add_argument("--gamma-dblprime", type=_rat, required=True)
    return p


def _cmd_eval(args) -> int:
    inst = _load(args.instance)
    if isinstance(inst, BipartiteGraph):
        if args.mu is None:
            raise UsageError("bipartite instances need --mu")
        _emit_value(red.z_is(inst, args.mu), args.json)
        return 0
    if args.q is None:
        raise UsageError("graph/hypergraph instances need --q")
    if args.potts:
        if isinstance(inst, WeightedGraph):
            inst = WeightedHypergraph.build(
                inst.n, [tuple(e) for e in inst.edges], inst.weights)
        q_int = int(args.q) if args.q.denominator == 1 else None
        if q_int is None:
            raise UsageError("--potts needs integer q")
        _emit_value(exact.potts(inst, q_int, args.max_edges), args.json)
        return 0
    if isinstance(inst, WeightedHypergraph):
        value = exact.tutte_hypergraph(inst, args.q, args.max_edges)
    else:
        value = exact.tutte_graph(inst, args.q, args.max_edges)
    if args.terminals and isinstance(inst, WeightedGraph):
        s, t = (int(x) for x in args.terminals.split(","))
        ts = exact.terminal_split(inst, s, t, args.q, args.max_edges)
        payload = _value_payload(value)
        payload["z_st"] = _value_payload(ts.z_joined)
        payload["z_s_t"] = _value_payload(ts.z_split)
        if args.json:
            print(json.dumps(payload))
        else:
            _emit_value(value, False)
            print(f"z_st = {rat_str(ts.z_joined)} ({rat_decimal(ts.z_joined)})")
            print(f"z_s|t = {rat_str(ts.z_split)} ({rat_decimal(ts.z_split)})")
        return 0
    _emit_value(value, args.json)
    return 0


def _parse_ids(text: str) -> frozenset[int]:
    if not text.strip():
        return frozenset()
    return frozenset(int(x) for x in text.split(","))


def _cmd_sample(args) -> int:
    inst = _load(args.instance)
    if not isinstance(inst, WeightedGraph):
        raise UsageError("sample needs a graph instance")
    p = rcm.probs_from_weights(inst)
    cond = rcm.Conditioning(_parse_ids(args.force_in), _parse_ids(args.force_out))
    model = rcm.RCModel(args.q) if args.model == "rc" else rcm.ERModel()
    steps = args.sweeps * inst.m
    if args.trace == "csv":
        _, largest = rcm.run_chain(inst, model, p, cond, steps, args.seed,
                                   record_mode=2, rec_a=max(inst.m, 1))
        print("sweep,largest_component")
        for i, x in enumerate(largest if largest is not None else []):
            print(f"{i + 1},{int(x)}")
        return 0
    state, _ = rcm.run_chain(inst, model, p, cond, steps, args.seed)
    from .graphs import connected_components

    count, part = connected_components(inst, state.edges)
    sizes = sorted((len(b) for b in part.blocks), reverse=True)
    report = {
        "model": args.model,
        "q": rat_str(args.q),
        "sweeps": args.sweeps,
        "seed": args.seed,
        "edges": sorted(state.edges),
        "edge_count": len(state.edges),
        "components": count,
        "component_sizes": sizes,
    }
    if args.json:
        print(json.dumps(report))
    else:
        print(f"edges ({len(state.edges)}): {sorted(state.edges)}")
        print(f"components: {count}, sizes {sizes}")
    return 0


def _cmd_tune(args) -> int:
    result = tune_rho(args.N, args.t, args.q, args.gamma, args.chi, n0=args.n0)
    payload = {
        "rho_num": str(result.rho.numerator),
        "rho_den": str(result.rho.denominator),
        "mu": result.mu,
        "grid_points": result.grid_points,
        "zeta_exact": result.zeta_exact,
        "window": [rat_str(result.window[0]), rat_str(result.window[1])],
        "evaluations": result.evaluations,
        "below_asymptotic_n": result.below_asymptotic_n,
    }
    if result.zeta_exact:
        payload["zeta"] = rat_str(result.zeta)
        payload["zeta_decimal"] = rat_decimal(result.zeta)
    else:
        payload["zeta_bounds"] = [rat_decimal(result.zeta_bounds[0], 24),
                                  rat_decimal(result.zeta_bounds[1], 24)]
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"rho = {rat_str(result.rho)}")
        if result.zeta_exact:
            print(f"zeta = {rat_str(result.zeta)} ({rat_decimal(result.zeta)})")
        else:
            print(f"zeta in [{payload['zeta_bounds'][0]}, {payload['zeta_bounds'][1]}]")
        print(f"grid point {result.mu} of {result.grid_points}; "
              f"window [{rat_decimal(result.window[0])}, {rat_decimal(result.window[1])}]")
        if result.below_asymptotic_n:
            print("note: N is below the asymptotic regime; only the exact "
                  "identities are certified")
    return 0


def _cmd_reduce(args) -> int:
    inst = _load(args.instance)
    if not isinstance(inst, BipartiteGraph):
        raise UsageError("reduce --from bis needs a bipartite instance")
    result = red.run_pipeline(inst, args.q, args.gamma, args.eps,
                              N_override=args.force_N)
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    trace_payload = []
    for i, tr in enumerate(result.traces):
        entry = {
            "stage": tr.stage,
            "scale_num": str(tr.scale.numerator),
            "scale_den": str(tr.scale.denominator),
            "eps_used": rat_str(tr.eps_used),
            "warnings": list(tr.warnings),
        }
        if out_dir is not None:
            path = out_dir / f"stage{i}_{tr.stage}.txt"
            path.write_text(serialize_instance(tr.instance))
            entry["file"] = str(path)
        trace_payload.append(entry)
    print(json.dumps({
        "stages": trace_payload,
        "final_vertices": result.final_graph.n,
        "final_edges": result.final_graph.m,
        "gamma": rat_str(result.final_gamma),
        "q": rat_str(result.q),
    }, indent=2))
    return 0


def _cmd_verify(args) -> int:
    from . import checks

    suites = {
        "fk": lambda: checks.check_fk(max_n=args.max_n),
        "dp": lambda: checks.check_dp(t_max=2, n_max=4, pairs=4),
        "wiring": lambda: checks.check_wiring(t_max=2, n_max=3),
        "couplings": lambda: checks.check_couplings(n_graphs=5, steps=2000),
        "fl": lambda: checks.check_fundamental_lemma(max_edges=3),
        "stationarity": lambda: checks.check_stationarity(samples=100_000),
        "apex": lambda: checks.check_apex_identity(max_vertices=5),
        "decomposition": lambda: checks.check_decomposition(),
        "sp": lambda: checks.check_series_parallel(),
        "ising3": lambda: checks.check_ising3(max_n=4),
        "implement": lambda: checks.check_implement_weight(n_targets=10),
        "tuner": lambda: checks.check_tuner_configs(
            configs=[("3", "1/5", "1/4"), ("3", "1000", "1/4")]),
        "bicolour": lambda: checks.check_bicolour_bounds(n_configs=20),
        "roundtrip": _roundtrip_check,
    }
    names = list(suites) if args.suite == "all" else [args.suite]
    failed = 0
    for name in names:
        t0 = time.time()
        try:
            detail = suites[name]()
            print(f"[PASS] {name}: {detail} ({time.time() - t0:.1f}s)")
        except AssertionError as exc:
            failed += 1
            print(f"[FAIL] {name}: {exc}")
    return 1 if failed else 0


def _roundtrip_check():
    samples = [
        WeightedGraph.build(3, [(0, 1), (1, 2), (0, 1)], ["1/2", 2, "7/3"]),
        WeightedHypergraph.build(4, [(0, 1, 2), (2, 3)], ["3/4", 5]),
        BipartiteGraph.build(2, 3, [(0, 0), (1, 2), (0, 1)]),
    ]
    for inst in samples:
        text = serialize_instance(inst)
        again = parse_instance(text)
        assert serialize_instance(again) == text
        assert type(again) is type(inst)
    return {"instances": len(samples)}


def _cmd_demo(args) -> int:
    from .phase import jump_summary, phase_sweep, rows_to_csv

    lambdas = None
    if args.lambdas:
        lambdas = [to_rat(x) for x in args.lambdas.split(",")]
    starts = tuple(s.strip() for s in args.starts.split(",") if s.strip())
    for s in starts:
        if s not in ("empty", "full"):
            raise UsageError(f"unknown start state {s!r}")
    rows = phase_sweep(args.q, args.N, args.sweeps, args.seed,
                       lambdas=lambdas, starts=starts, jobs=args.jobs)
    csv_text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(csv_text)
        print(f"wrote {args.out} ({len(rows)} rows)")
    else:
        sys.stdout.write(csv_text)
    summary = jump_summary(rows, args.q)
    print(f"# theta = {summary['theta']:.6f}", file=sys.stderr)
    for start, jumped in summary["jump"].items():
        print(f"# start={start}: crosses theta within sweep: {jumped}",
              file=sys.stderr)
    return 0


def _cmd_gadget(args) -> int:
    if args.gadget_command != "dump-dp":
        raise UsageError("gadget needs a subcommand (dump-dp)")
    table = dp_weights(args.t, args.N, args.gamma_prime, args.gamma_dblprime)
    print("t,N,k,l,w_num,w_den")
    for (tp, np_, k, ell), val in table.rows():
        print(f"{tp},{np_},{k},{ell},{val.numerator},{val.denominator}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.version:
            print(f"pottsforge {__version__} (backend: {backend.BACKEND_NAME})")
            return 0
        if args.command is None:
            raise UsageError("missing subcommand")
        t0 = time.time()
        handlers = {
            "eval": _cmd_eval,
            "sample": _cmd_sample,
            "tune": _cmd_tune,
            "reduce": _cmd_reduce,
            "verify": _cmd_verify,
            "demo": _cmd_demo,
            "gadget": _cmd_gadget,
        }
        code = handlers[args.command](args)
        print(f"# {args.command} finished in {time.time() - t0:.2f}s "
              f"(backend: {backend.BACKEND_NAME})", file=sys.stderr)
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (EnumerationCapError, NoCrossingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
