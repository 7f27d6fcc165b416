"""Command line: ``petribench <command> ...``."""
from __future__ import annotations

import argparse
import logging
import sys

from .net import NetError


def _cmd_generate(a) -> int:
    from .models import generate
    from .pnml import write_pnml_file
    net = generate(a.family, a.param)
    write_pnml_file(net, a.out)
    print(f"wrote {a.out}: {net.n_places} places, {net.n_transitions} transitions")
    return 0


def _cmd_list(a) -> int:
    from .models import list_instances
    for p in list_instances(a.family):
        print(p)
    return 0


def _budget(a):
    from .engine import ExploreOptions
    return ExploreOptions(max_states=a.max_states, max_seconds=a.timeout,
                          order=getattr(a, "order", "bfs"),
                          store_graph=getattr(a, "graph", False))


def _cmd_explore(a) -> int:
    from .engine import ReachabilityGraph, run_exploration
    from .pnml import read_pnml_file
    net = read_pnml_file(a.model)
    opts = _budget(a)
    r, ex = run_exploration(net, opts)
    print(f"count: {r.count}")
    print(f"exhausted: {'true' if r.exhausted else 'false'}")
    if not r.exhausted:
        print(f"stopped: {r.stop_reason}")
    bounds = r.place_bounds
    print(f"max_bound: {max(bounds, default=0)}")
    print(f"safe: {'true' if all(b <= 1 for b in bounds) else 'false'}")
    if a.bounds:
        for name, b in zip(net.place_names, bounds):
            print(f"bound {name}: {b}")
    if r.dead_marking is not None:
        marked = [f"{p}={k}" for p, k in zip(net.place_names, r.dead_marking) if k]
        print(f"deadlock: {' '.join(marked) or '(empty marking)'}")
    elif r.exhausted:
        print("deadlock: none")
    else:
        print("deadlock: unknown")
    if a.graph and r.exhausted:
        g = ReachabilityGraph(net, ex.markings(), ex.edges())
        print(f"edges: {g.n_edges}")
        print(f"terminal_components: {len(g.bottom_components())}")
    print(f"seconds: {r.elapsed_seconds:.3f}")
    return 0


def _cmd_check(a) -> int:
    from .formula import evaluate, parse_formulae
    from .pnml import read_pnml_file
    net = read_pnml_file(a.model)
    with open(a.formulae) as f:
        fs = parse_formulae(f.read())
    v = evaluate(net, fs, _budget(a))
    if a.verbose:
        for ident, o in zip(v.identifiers, v.outcomes):
            note = v.diagnostics.get(ident)
            print(f"{ident}: {o.value}" + (f"  ({note})" if note else ""))
    for ident, note in sorted(v.diagnostics.items()):
        print(f"warning: {ident}: {note}", file=sys.stderr)
    print(f"vector: {v}")
    return 0


def _cmd_bench(a) -> int:
    from .harness import load_plan, run_examination
    plan = load_plan(a.plan, output_dir=a.out)
    records = run_examination(plan, workers=a.workers)
    counts: dict[str, int] = {}
    for r in records:
        counts[r.verdict.value] = counts.get(r.verdict.value, 0) + 1
    print(f"records: {len(records)} " + " ".join(f"{k}={v}" for k, v in sorted(counts.items())))
    print(f"results: {plan.output_dir / 'results.csv'}")
    return 0


def _cmd_report(a) -> int:
    from .harness import load_results
    from .report import CHART_KINDS, write_report
    charts = CHART_KINDS if a.charts is None else [c for c in a.charts.split(",") if c]
    tables = a.tables or a.charts is None
    records = load_results(a.results, with_traces="execution" in charts)
    written = write_report(records, a.out, charts=charts, tables=tables)
    print(f"wrote {len(written)} files to {a.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="petribench",
                                description="Petri net benchmark models, engine and harness.")
    p.add_argument("-v", "--log-level", default="WARNING",
                   help="logging level (DEBUG, INFO, WARNING, ...)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write one model instance as PNML")
    g.add_argument("--family", required=True)
    g.add_argument("--param", required=True, help="integer, or rRwW for reader/writer pairs")
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_generate)

    li = sub.add_parser("list-instances", help="print the official parameters of a family")
    li.add_argument("--family", required=True)
    li.set_defaults(func=_cmd_list)

    def budget(sp):
        sp.add_argument("--max-states", type=int, default=10**7)
        sp.add_argument("--timeout", type=float, default=300.0, help="seconds")

    e = sub.add_parser("explore", help="explore the state space of a PNML model")
    e.add_argument("model")
    e.add_argument("--order", choices=("bfs", "dfs"), default="bfs")
    e.add_argument("--graph", action="store_true", help="store edges and report terminal components")
    e.add_argument("--bounds", action="store_true", help="print the bound of every place")
    budget(e)
    e.set_defaults(func=_cmd_explore)

    c = sub.add_parser("check", help="evaluate a formula file on a PNML model")
    c.add_argument("model")
    c.add_argument("--formulae", required=True)
    c.add_argument("--verbose", action="store_true")
    budget(c)
    c.set_defaults(func=_cmd_check)

    b = sub.add_parser("bench", help="run a benchmark plan")
    b.add_argument("--plan", required=True)
    b.add_argument("--out", required=True)
    b.add_argument("--workers", type=int, default=None,
                   help="parallel series (default: $PETRIBENCH_WORKERS or 1)")
    b.set_defaults(func=_cmd_bench)

    r = sub.add_parser("report", help="render tables and charts from bench results")
    r.add_argument("--results", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--charts", default=None,
                   help="comma list of scaling,execution,radar-model,radar-tool")
    r.add_argument("--tables", action="store_true")
    r.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=a.log_level.upper(), format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except (ValueError, KeyError, OSError, NetError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"petribench {a.command}: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
