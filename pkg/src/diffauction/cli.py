"""Command line front end.

    diffauction run fig2 --mechanism idm
    diffauction compare line5
    diffauction verify ic --n-max 4 --grid 0,1,2
    diffauction gen er 50 0.1 --seed 1 --out er50.json
    diffauction bench --sizes 10,50,100,200

Exit codes: 0 ok, 1 a property the mechanisms should satisfy failed,
2 bad input, 3 a resource bound cut the run short.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass
from typing import Optional

from . import generators
from .graph import build_diffusion_graph, critical_nodes_oracle_all, dominator_analysis, same_critical_nodes, to_dot
from .mechanisms import MechanismKind, format_value, run
from .model import as_value, feasibility_transform, forced_null, truthful_profile
from .scenario import ScenarioError, dumps_scenario, load_scenario
from .verifier import (
    VerificationReport,
    check_IC,
    check_IR,
    check_WBB,
    default_processes,
    dominance_campaign,
    dominator_campaign,
    exhaustive_sweep,
    random_profile_sampler,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_BOUND = 0, 1, 2, 3
CSV_COLUMNS = ["scenario", "mechanism", "winner", "revenue", "welfare", "n", "seed"]


class InputError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    mechanism: MechanismKind = MechanismKind.IDM
    tie_break: str = "lowest"
    seed: Optional[int] = None
    precision: Optional[int] = None
    output: str = "pretty"

    def __post_init__(self):
        if self.tie_break not in ("lowest", "seeded"):
            raise InputError(f"unknown tie-break {self.tie_break!r}")
        if (self.tie_break == "seeded") != (self.seed is not None):
            raise InputError("--seed is required with --tie-break seeded, and only then")

    def rng(self) -> Optional[random.Random]:
        return random.Random(self.seed) if self.tie_break == "seeded" else None


def _grid(text: str) -> tuple:
    try:
        return tuple(as_value(x) for x in text.split(",") if x.strip())
    except (TypeError, ValueError, ArithmeticError) as exc:
        raise InputError(f"bad grid {text!r}") from exc


def _mechanisms(text: Optional[str], default) -> tuple[MechanismKind, ...]:
    if not text:
        return default
    try:
        return tuple(MechanismKind.parse(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _load(path: str, precision: Optional[int] = None):
    try:
        return load_scenario(path, precision)
    except ScenarioError as exc:
        raise InputError(str(exc)) from exc


def _pretty_outcome(net, profile, out) -> str:
    lines = [
        f"mechanism: {out.mechanism.value}",
        f"winner:    {net.label(out.winner)}",
        f"revenue:   {format_value(out.revenue)}",
        f"welfare:   {format_value(out.welfare)}",
        "",
        f"{'buyer':<8}{'value':>8}{'bid':>8}{'payment':>10}  status",
    ]
    for i in net.buyers:
        bid = "null" if profile[i] is None else format_value(profile[i].value)
        lines.append(
            f"{net.label(i):<8}{format_value(net.valuations[i]):>8}{bid:>8}"
            f"{format_value(out.payments[i]):>10}  {out.status[i].value}"
        )
    return "\n".join(lines)


def _csv_rows(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: row.get(k, "") for k in CSV_COLUMNS})
    return buf.getvalue()


def _prepare(args, cfg: RunConfig):
    net, declared = _load(args.scenario, cfg.precision)
    profile = truthful_profile(net) if declared is None else declared
    fixed = feasibility_transform(net, profile)
    nulled = forced_null(profile, fixed)
    if nulled:
        names = ", ".join(net.label(i) for i in nulled)
        print(f"warning: declared profile not feasible; forced to null: {names}", file=sys.stderr)
    return net, fixed


def cmd_run(args) -> int:
    cfg = RunConfig(MechanismKind.parse(args.mechanism), args.tie_break, args.seed, args.precision, args.output)
    net, profile = _prepare(args, cfg)
    out = run(cfg.mechanism, net, profile, rng=cfg.rng())
    if args.dot:
        g = build_diffusion_graph(net, profile)
        with open(args.dot, "w") as fh:
            fh.write(to_dot(g, labels=[net.label(i) for i in range(net.n)]))
    if cfg.output == "json":
        rec = out.to_record(net)
        rec["scenario"] = args.scenario
        print(json.dumps(rec, indent=2))
    elif cfg.output == "csv":
        print(_csv_rows([_csv_record(args.scenario, net, out, cfg.seed)]), end="")
    else:
        print(_pretty_outcome(net, profile, out))
    return EXIT_OK


def _csv_record(scenario, net, out, seed) -> dict:
    return {
        "scenario": scenario,
        "mechanism": out.mechanism.value,
        "winner": net.label(out.winner),
        "revenue": format_value(out.revenue),
        "welfare": format_value(out.welfare),
        "n": net.n,
        "seed": "" if seed is None else seed,
    }


def cmd_compare(args) -> int:
    cfg = RunConfig(precision=args.precision, output=args.output)
    net, profile = _prepare(args, cfg)
    outs = {k: run(k, net, profile) for k in (MechanismKind.IDM, MechanismKind.VCG, MechanismKind.SPL)}
    idm, vcg, spl = outs[MechanismKind.IDM], outs[MechanismKind.VCG], outs[MechanismKind.SPL]
    problems = []
    if idm.revenue < vcg.revenue:
        problems.append("IDM revenue below network VCG")
    if idm.revenue < 0:
        problems.append("IDM revenue negative")
    if idm.revenue < spl.revenue:
        problems.append("IDM revenue below local second price")
    if idm.welfare < spl.welfare:
        problems.append("IDM welfare below local second price")
    if cfg.output == "json":
        doc = {"scenario": args.scenario, "outcomes": [o.to_record(net) for o in outs.values()], "violations": problems}
        print(json.dumps(doc, indent=2))
    elif cfg.output == "csv":
        print(_csv_rows([_csv_record(args.scenario, net, o, None) for o in outs.values()]), end="")
    else:
        print(f"{'mechanism':<10}{'winner':>8}{'revenue':>10}{'welfare':>10}")
        for k, o in outs.items():
            print(f"{k.value:<10}{net.label(o.winner):>8}{format_value(o.revenue):>10}{format_value(o.welfare):>10}")
        for p in problems:
            print(f"VIOLATION: {p}")
    return EXIT_FAIL if problems else EXIT_OK


def cmd_verify(args) -> int:
    suites = ["ic", "wbb", "dominance", "dominators"] if args.suite == "all" else [args.suite]
    deadline = None if args.time_limit is None else time.monotonic() + args.time_limit
    reports: list[VerificationReport] = []
    complete = True
    extra: dict = {}

    def remaining() -> Optional[float]:
        return None if deadline is None else max(deadline - time.monotonic(), 0.0)

    for suite in suites:
        if suite in ("ic", "ir"):
            kinds = _mechanisms(args.mechanism, (MechanismKind.VCG, MechanismKind.IDM))
            if args.scenario:
                net, _ = _load(args.scenario)
                for k in kinds:
                    if suite == "ic":
                        reports.append(check_IC(net, k, others_samples=args.others_samples, seed=args.seed, grid=_grid(args.grid)))
                    reports.append(check_IR(net, k, others_samples=args.others_samples, seed=args.seed, grid=_grid(args.grid)))
            else:
                if args.n_max > 6:
                    raise InputError("exhaustive sweeps are limited to --n-max 6")
                res = exhaustive_sweep(
                    n_max=args.n_max,
                    grid=_grid(args.grid),
                    kinds=kinds,
                    up_to_isomorphism=args.iso,
                    processes=args.processes,
                    time_limit=remaining(),
                )
                complete &= res.complete
                extra["sweep"] = {"scenarios": res.scenarios, "topologies": res.topologies, "seconds": round(res.elapsed, 2)}
                # the ic sweep also carries the IR and structural checks it computed
                reports.extend(r for r in res.reports.values() if suite == "ic" or r.property == "IR")
        elif suite == "wbb":
            kinds = _mechanisms(args.mechanism, (MechanismKind.IDM, MechanismKind.VCG))
            for k in kinds:
                if args.scenario:
                    net, _ = _load(args.scenario)
                    reports.append(check_WBB(net, k))
                else:
                    sampler = random_profile_sampler(args.graph_n_max, _grid(args.grid))
                    reports.append(check_WBB(None, k, sampler, args.trials, args.seed))
        elif suite == "dominance":
            rep, done = dominance_campaign(args.trials, args.seed, args.graph_n_max, _grid(args.grid), deadline)
            complete &= done
            reports.append(rep)
        elif suite == "dominators":
            reports.append(dominator_campaign(min(args.trials, 500) if args.suite == "all" else args.trials, args.seed))

    for rep in reports:
        print(rep.summary_line())
        for cx in rep.counterexamples[:3]:
            if rep.asserted:
                print("  counterexample:", json.dumps(cx.to_dict()))
            else:
                print(f"  expected: {cx.note}")
    doc = {"suite": args.suite, "seed": args.seed, "complete": complete, **extra, "reports": [r.to_dict() for r in reports]}
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(doc, fh, indent=2)
    if not complete:
        print("resource bound reached: partial report", file=sys.stderr)
        return EXIT_BOUND
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_gen(args) -> int:
    grid = _grid(args.grid)
    if args.kind == "line":
        values = None if args.values is None else list(_grid(args.values))
        net = generators.line_graph(args.length, values)
    elif args.kind == "er":
        net = generators.erdos_renyi(args.n, args.p, args.seed, grid)
    else:
        net = generators.random_tree(args.n, args.seed, grid)
    text = dumps_scenario(net)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    rng = random.Random(args.seed)
    print(f"{'n':>6}{'edges':>8}{'dominators_ms':>15}{'oracle_ms':>12}  equal")
    ok = True
    for n in sizes:
        if n < 2:
            print(f"{n:>6}{0:>8}{0.0:>15.3f}{0.0:>12.3f}  True")
            continue
        net = generators.erdos_renyi(n, min(3.0 / n, 1.0), rng, (0, 1, 2, 3))
        prof = generators.random_profile(net, rng, (0, 1, 2, 3))
        g = build_diffusion_graph(net, prof)
        an = dominator_analysis(g)
        oracle = critical_nodes_oracle_all(g)
        equal = not same_critical_nodes(an, oracle)
        ok &= equal
        t0 = time.perf_counter()
        for _ in range(args.repeats):
            dominator_analysis(g)
        t1 = time.perf_counter()
        for _ in range(args.repeats):
            critical_nodes_oracle_all(g)
        t2 = time.perf_counter()
        edges = sum(len(e) for e in g.out_edges)
        print(f"{n:>6}{edges:>8}{1000 * (t1 - t0) / args.repeats:>15.3f}{1000 * (t2 - t1) / args.repeats:>12.3f}  {equal}")
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="diffauction", description="Auctions with information diffusion on social networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one mechanism on a scenario")
    p.add_argument("scenario", help="scenario JSON path or bundled name (line5, fig2, single)")
    p.add_argument("--mechanism", default="idm", help="idm, vcg or spl")
    p.add_argument("--tie-break", default="lowest", choices=["lowest", "seeded"])
    p.add_argument("--seed", type=int)
    p.add_argument("--precision", type=int, help="decimal places valuations are quantized to")
    p.add_argument("--output", default="pretty", choices=["pretty", "json", "csv"])
    p.add_argument("--dot", help="also write the diffusion graph and dominator tree as Graphviz")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="IDM vs network VCG vs local second price")
    p.add_argument("scenario")
    p.add_argument("--precision", type=int)
    p.add_argument("--output", default="pretty", choices=["pretty", "json", "csv"])
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="check IC / IR / budget balance / revenue dominance")
    p.add_argument("suite", choices=["ir", "ic", "wbb", "dominance", "dominators", "all"])
    p.add_argument("--n-max", type=int, default=4, help="agents (seller included) for exhaustive sweeps")
    p.add_argument("--grid", default="0,1,2,3", help="valuation grid, comma separated")
    p.add_argument("--mechanism", help="comma separated subset of idm,vcg,spl")
    p.add_argument("--scenario", help="check one scenario instead of sweeping")
    p.add_argument("--others-samples", type=int, default=0, help="random profiles of the other buyers per scenario")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--graph-n-max", type=int, default=50, help="largest random graph for sampled suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iso", action="store_true", help="sweep one graph per isomorphism class")
    p.add_argument("--processes", type=int, default=default_processes())
    p.add_argument("--time-limit", type=float, help="seconds; exit 3 with a partial report when exceeded")
    p.add_argument("--json", help="write the full JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="write a scenario file")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("line", help="seller at the end of a path of buyers")
    g.add_argument("length", type=int)
    g.add_argument("--values", help="comma separated buyer values, nearest the seller first")
    g = gsub.add_parser("er", help="connected Erdos-Renyi graph")
    g.add_argument("n", type=int)
    g.add_argument("p", type=float)
    g = gsub.add_parser("tree", help="uniform random labeled tree")
    g.add_argument("n", type=int)
    for g in gsub.choices.values():
        g.add_argument("--seed", type=int, default=0)
        g.add_argument("--grid", default="0,1,2,3,4,5,6,7,8,9,10", help="valuations are drawn uniformly from this grid")
        g.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="dominator tree vs removal oracle timings")
    p.add_argument("--sizes", default="1,10,50,100,200")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeats", type=int, default=3)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ScenarioError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
