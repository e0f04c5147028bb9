"""Command-line interface.

Exit codes: 0 success, 1 malformed input files, 2 infeasible or out-of-regime
parameters.  Items are 1-indexed at this boundary and in all files; the
library itself is 0-indexed.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

import numpy as np

from . import codec, design, sim
from .graphs import sample_graph

TABLE_D_RANGE = {1: range(2, 19), 2: range(2, 18), 3: range(2, 18)}
COMPARE_DEFAULT_D = {1: 18, 2: 17, 3: 17}


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        sys.exit(1)


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _pick_seed(args):
    if args.seed is not None:
        return args.seed
    seed = secrets.randbits(32)
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def cmd_design(args):
    res = design.optimize_design(args.t, args.d)
    _emit(json.dumps(res.to_dict(), indent=2) + "\n", args.out)


def cmd_plan(args):
    res = design.optimize_design(args.t, args.d)
    plan = design.make_plan(args.N, args.K, res, margin=args.margin)
    _emit(json.dumps(plan.to_dict(), indent=2) + "\n", args.out)


def cmd_gen(args):
    seed = _pick_seed(args)
    res = design.optimize_design(args.t, args.d)
    if args.M is not None and args.r is not None:
        M, r = args.M, args.r
    else:
        plan = design.make_plan(args.N, args.K, res, margin=args.margin)
        M, r = plan.M, plan.r
    graph = sample_graph(args.N, M, r, res.profile, seed)
    test_plan = codec.TestPlan(graph, codec.build_signature(args.t, r), seed=seed)
    _emit(json.dumps(test_plan.to_dict()) + "\n", args.out)


def cmd_encode(args):
    plan = codec.TestPlan.from_dict(_load_json(args.plan))
    support = codec.SupportVector.from_dict(_load_json(args.support))
    if support.N != plan.N:
        print(f"error: support is over N={support.N}, plan over N={plan.N}", file=sys.stderr)
        sys.exit(1)
    results = codec.encode(plan, support)
    _emit(json.dumps(results.to_dict()) + "\n", args.out)


def cmd_decode(args):
    plan = codec.TestPlan.from_dict(_load_json(args.plan))
    results = codec.TestResults.from_dict(
        _load_json(args.results), plan.M, plan.signature.s
    )
    outcome = codec.peel_decode(plan, results, max_iterations=args.max_iterations)
    _emit(json.dumps(outcome.to_dict(), indent=2) + "\n", args.out)
    if outcome.stalled or outcome.failed_nodes:
        sys.exit(1)


def cmd_simulate(args):
    seed = _pick_seed(args)
    config = sim.TrialConfig(
        N=args.N,
        K=args.K,
        t=args.t,
        d=args.d,
        trials=args.trials,
        seed=seed,
        margin=args.margin,
        jobs=args.jobs,
    )
    lines = [sim.CSV_HEADER]
    if args.m:
        m_values = [int(v) for v in args.m.split(",")]
        for report in sim.run_sweep(config, m_values):
            lines.append(report.csv_row())
    else:
        _, report = sim.planner_report(config)
        lines.append(report.csv_row())
    _emit("\n".join(lines) + "\n", args.out)


def cmd_tables(args):
    d_range = TABLE_D_RANGE[args.t]
    d_max = max(d_range)
    header = ["t", "d", "c", "ell"] + [f"lambda_{i}" for i in range(2, d_max + 1)]
    lines = [",".join(header)]
    for d in d_range:
        try:
            res = design.optimize_design(args.t, d)
        except design.Infeasible:
            lines.append(",".join([str(args.t), str(d), "infeasible", ""] + [""] * (d_max - 1)))
            continue
        lam = [f"{v:.4g}" if v > 5e-5 else "" for v in res.profile.lam[1:]]
        lam += [""] * (d_max - d)
        row = [str(args.t), str(d), f"{res.nodes_per_defective:.4g}", f"{res.profile.avg_degree:.4g}"]
        lines.append(",".join(row + lam))
    _emit("\n".join(lines) + "\n", args.out)


def cmd_compare(args):
    K_values = [int(v) for v in args.K_list.split(",")]
    designs = {t: design.optimize_design(t, COMPARE_DEFAULT_D[t]) for t in (1, 2, 3)}
    lines = ["K,m_t1,m_t2,m_t3,m_regular,m_greedy"]
    for K in K_values:
        cols = [str(K)]
        for t in (1, 2, 3):
            cols.append(f"{design.proposed_tests(args.N, K, designs[t]):.6g}")
        cols.append(f"{design.baseline_tests('regular-graph', args.N, K):.6g}")
        cols.append(f"{design.baseline_tests('greedy', args.N, K):.6g}")
        lines.append(",".join(cols))
    _emit("\n".join(lines) + "\n", args.out)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qgt", description="Quantitative group testing toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    def common_design(sp):
        sp.add_argument("--t", type=int, required=True, choices=[1, 2, 3, 4])
        sp.add_argument("--d", type=int, required=True)

    def common_out(sp):
        sp.add_argument("--out", help="write output to this file instead of stdout")

    sp = sub.add_parser("design", help="optimize a degree profile")
    common_design(sp)
    common_out(sp)
    sp.set_defaults(func=cmd_design)

    sp = sub.add_parser("plan", help="integer plan sizes for (N, K)")
    common_design(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--margin", type=float, default=1.0)
    common_out(sp)
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("gen", help="sample a reusable test plan")
    common_design(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--M", type=int)
    sp.add_argument("--r", type=int)
    sp.add_argument("--margin", type=float, default=1.0)
    sp.add_argument("--seed", type=int)
    common_out(sp)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("encode", help="measurements of a known support")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--support", required=True)
    common_out(sp)
    sp.set_defaults(func=cmd_encode)

    sp = sub.add_parser("decode", help="recover the support from measurements")
    sp.add_argument("--plan", required=True)
    sp.add_argument("--results", required=True)
    sp.add_argument("--max-iterations", type=int)
    common_out(sp)
    sp.set_defaults(func=cmd_decode)

    sp = sub.add_parser("simulate", help="Monte Carlo error-rate estimation")
    common_design(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--m", help="comma-separated test budgets to sweep")
    sp.add_argument("--margin", type=float, default=1.0)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--jobs", type=int, default=1)
    common_out(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("tables", help="profile constants over the tabulated d range")
    sp.add_argument("--t", type=int, required=True, choices=[1, 2, 3])
    common_out(sp)
    sp.set_defaults(func=cmd_tables)

    sp = sub.add_parser("compare", help="closed-form test counts vs baselines")
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--K-list", required=True, dest="K_list")
    common_out(sp)
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except codec.FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (design.Infeasible, design.OutOfRegime) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SystemExit as exc:
        return int(exc.code or 0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
