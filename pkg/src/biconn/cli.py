"""``biconn`` command line.

Exit codes: 0 pass, 1 property or verification failure, 2 usage/input error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional

from . import __version__
from .crossing import build_separability_graph, cactus_two_cuts, covers, exact_min_cover, min_edge_cuts, solve_crossing_aug
from .dot import export_dot
from .embedding import METHODS, SamplerConfig
from .errors import BiconnError, InvariantViolation
from .graph_core import GENERATOR_KINDS, Graph, Tree, generate, is_two_connected_edges
from .incidence import KINDS, build_incidence
from .io import Instance, dumps, instance_to_dict, parse_instance, report_to_dict, write_instance
from .solvers import (
    augmentation_feasible,
    exact_2cds,
    exact_augmentation,
    exact_quota_family,
    node_profit,
    solve_2cds,
    solve_block_tree_aug,
    solve_quota_family,
    solve_tree_aug_ec,
    two_cds_feasible,
)
from .suites import SUITES, run_check, run_suite, summary_csv

PROBLEMS = ("bta", "taec", "2cds", "ksub", "quota", "budget", "crossaug")
QUOTA_MODES = {"ksub": "k_subgraph", "quota": "quota", "budget": "budget"}
NEEDS = {"bta": "bta", "taec": "bta", "2cds": "graph", "ksub": "quota", "quota": "quota", "budget": "quota", "crossaug": "family"}


class UsageError(Exception):
    pass


def _range(text: Optional[str]):
    if text is None:
        return None
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _load(path: str, problem: Optional[str] = None) -> Instance:
    inst = parse_instance(path)
    if problem is not None and inst.kind != NEEDS[problem]:
        raise UsageError(f"problem {problem} needs a {NEEDS[problem]} instance, got {inst.kind}")
    return inst


# ---------------------------------------------------------------------------


def cmd_gen(args) -> int:
    rng = random.Random(f"gen/{args.kind}/{args.seed}")
    costs, profits = _range(args.costs), _range(args.profits)
    if args.kind in GENERATOR_KINDS:
        params = {"n": args.n, "p": args.p, "rows": args.rows, "cols": args.cols, "connected": True, "costs": costs, "profits": profits}
        if args.max_cycle:
            params["max_cycle"] = args.max_cycle
        inst = Instance("graph", args.seed, graph=generate(args.kind, params, args.seed))
    elif args.kind == "bta":
        from .suites import feasible_candidates

        tree = Tree.from_graph(generate("random_tree", {"n": args.n, "costs": costs}, args.seed))
        es = feasible_candidates(tree, rng, args.candidates)
        inst = Instance("bta", args.seed, tree=tree, edges=es)
    elif args.kind in ("cactus_family", "mincut_family"):
        if args.kind == "cactus_family":
            fam = cactus_two_cuts(generate("random_cactus", {"n": args.n, "max_cycle": args.max_cycle or 6}, args.seed))
        else:
            fam = min_edge_cuts(generate("gnp", {"n": args.n, "p": args.p, "connected": True}, args.seed))
        pool = [(u, v) for u in range(args.n) for v in range(u + 1, args.n)]
        rng.shuffle(pool)
        cand = pool[: args.candidates]
        for e in pool[args.candidates:]:
            ok, witness = covers(cand, fam)
            if ok:
                break
            if (e[0] in witness) != (e[1] in witness):
                cand.append(e)
        inst = Instance("family", args.seed, family=fam, candidates=tuple(sorted(cand)))
    else:
        g = generate("gnp", {"n": args.n, "p": args.p, "connected": True, "costs": costs, "profits": profits}, args.seed)
        mode = QUOTA_MODES.get(args.mode, args.mode)
        target = Fraction(args.target) if args.target is not None else Fraction(min(3, args.n))
        inst = Instance("quota", args.seed, graph=g, mode=mode, target=target)
    _emit(dumps(instance_to_dict(inst)), args.output)
    return 0


def _config(args, inst: Instance) -> SamplerConfig:
    seed = args.seed if args.seed is not None else (inst.seed or 0)
    return SamplerConfig(args.method, args.samples, seed)


def solve_instance(problem: str, inst: Instance, args):
    if problem == "bta":
        return solve_block_tree_aug(inst.tree, inst.edges, exact=args.exact, oracle=args.oracle, cap=args.cap)
    if problem == "taec":
        return solve_tree_aug_ec(inst.tree, inst.edges, exact=args.exact, oracle=args.oracle, cap=args.cap)
    if problem == "2cds":
        return solve_2cds(inst.graph, _config(args, inst), oracle=args.oracle)
    if problem in QUOTA_MODES:
        mode = QUOTA_MODES[problem]
        if mode != inst.mode:
            raise UsageError(f"instance mode is {inst.mode}, not {mode}")
        root = args.root if args.root is not None else inst.root
        return solve_quota_family(inst.graph, mode, inst.target, _config(args, inst), root=root, oracle=args.oracle, exact_cap=args.cap)
    if not inst.candidates:
        raise UsageError("crossaug needs candidate_edges in the family instance")
    return solve_crossing_aug(inst.family, inst.candidates, exact=args.exact, oracle=args.oracle, cap=args.cap)


def cmd_solve(args) -> int:
    inst = _load(args.input, args.problem)
    report = solve_instance(args.problem, inst, args)
    _emit(dumps(report_to_dict(report, inst, timings=args.timings)), args.output)
    return 0


def verify_solution(problem: str, inst: Instance, doc: dict) -> Optional[str]:
    """None when the reported solution passes the direct check, else the reason."""
    if not doc.get("feasible"):
        return None
    chosen = [tuple(e) for e in doc["solution"]["chosen"]]
    edges = [tuple(e) for e in doc["solution"]["edges"]]
    if problem in ("bta", "taec"):
        mode = "node" if problem == "bta" else "edge"
        return None if augmentation_feasible(inst.tree, chosen, mode) else f"T + F is not 2-{mode}-connected"
    if problem == "2cds":
        return None if two_cds_feasible(inst.graph, edges) else "not a 2-connected dominating subgraph"
    if problem == "crossaug":
        ok, witness = covers(chosen, inst.family)
        return None if ok else f"member {sorted(witness)} uncovered"
    g = inst.graph
    if not edges:
        return None if problem == "budget" or inst.target <= 0 else "empty solution"
    if any(not g.has_edge(*e) for e in edges):
        return "solution uses an edge outside the graph"
    if not is_two_connected_edges(edges):
        return "subgraph is not 2-connected"
    nodes = {v for e in edges for v in e}
    cost = sum((g.cost(*e) for e in edges), Fraction(0))
    if problem == "ksub" and len(nodes) < inst.target:
        return f"{len(nodes)} nodes < k"
    if problem == "quota" and node_profit(g, nodes) < inst.target:
        return "profit below quota"
    if problem == "budget" and cost > inst.target:
        return "cost above budget"
    return None


def cmd_verify(args) -> int:
    inst = _load(args.input, args.problem)
    doc = json.loads(Path(args.report).read_text())
    reason = verify_solution(args.problem, inst, doc)
    print("ok" if reason is None else f"FAIL: {reason}")
    return 0 if reason is None else 1


def cmd_oracle(args) -> int:
    inst = _load(args.input, args.problem)
    p = args.problem
    if p in ("bta", "taec"):
        opt, sol = exact_augmentation(inst.tree, inst.edges, "node" if p == "bta" else "edge", "size" if p == "bta" else "cost", cap_n=args.cap)
        out = {"opt": opt, "solution": [list(e) for e in sol]}
    elif p == "2cds":
        edges, nodes, sub = exact_2cds(inst.graph, cap_n=args.cap)
        out = {"opt": edges, "opt_nodes": nodes, "nodes": list(sub)}
    elif p in QUOTA_MODES:
        value, sol = exact_quota_family(inst.graph, inst.mode, inst.target)
        out = {"opt": value, "solution": [list(e) for e in sol]}
    else:
        sol = exact_min_cover(inst.family, inst.candidates)
        out = {"opt": len(sol), "solution": [list(e) for e in sol]}
    _emit(dumps({"problem": p, **out}), args.output)
    return 0


def cmd_suite(args) -> int:
    names = sorted(SUITES) if args.name == "all" else [args.name]
    params = {"trials": args.trials, "n_max": args.n_max}
    out = Path(args.output) if args.output else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    results = []
    for name in names:
        res = run_suite(name, params, args.seed)
        results.append(res)
        if out:
            summary = {"suite": name, "seed": args.seed, "params": params, "passed": res.passed, "notes": res.notes, **res.row(args.timings)}
            (out / f"{name}.json").write_text(dumps(summary))
            for inst in res.failures:
                write_instance(inst, out / f"counterexample_{name}_{inst.check['trial']}.json")
    text = summary_csv(results, args.timings)
    if out:
        (out / "summary.csv").write_text(text)
    sys.stdout.write(text)
    for res in results:
        if not res.passed:
            print(f"{res.name}: {res.instances - res.agreements} disagreement(s)", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


def cmd_export_dot(args) -> int:
    inst = parse_instance(args.input)
    if args.object == "graph":
        if inst.graph is not None:
            obj = inst.graph
        elif inst.tree is not None:
            obj = Graph(inst.tree.n, tuple(sorted(inst.tree.edges + inst.edges.edges, key=lambda e: e.key)))
        else:
            raise UsageError("graph export needs a graph, quota or bta instance")
    elif args.object == "separability":
        if inst.family is None:
            raise UsageError("separability export needs a family instance")
        obj = build_separability_graph(inst.family, inst.candidates)
    else:
        if inst.tree is None:
            raise UsageError("incidence export needs a bta instance")
        obj = build_incidence(inst.tree, inst.edges, args.object)
    data = export_dot(obj, args.output)
    if not args.output:
        sys.stdout.write(data.decode())
    return 0


def cmd_replay(args) -> int:
    inst = parse_instance(args.input)
    outcome = run_check(inst)
    name = inst.check.get("property")
    print(f"{name}: {'agree' if outcome.agree else 'DISAGREE'}")
    return 0 if outcome.agree else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biconn", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--kind", required=True, choices=list(GENERATOR_KINDS) + ["bta", "cactus_family", "mincut_family", "quota"])
    g.add_argument("--n", type=int, default=8)
    g.add_argument("--p", type=float, default=0.4)
    g.add_argument("--rows", type=int)
    g.add_argument("--cols", type=int)
    g.add_argument("--max-cycle", type=int)
    g.add_argument("--candidates", type=int, default=6)
    g.add_argument("--costs", help="integer cost range lo,hi")
    g.add_argument("--profits", help="integer profit range lo,hi")
    g.add_argument("--mode", choices=list(QUOTA_MODES) + list(QUOTA_MODES.values()), default="ksub")
    g.add_argument("--target", help="k, Q or B")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="run a pipeline and write a report")
    s.add_argument("--problem", required=True, choices=PROBLEMS)
    s.add_argument("--input", required=True)
    s.add_argument("--output")
    s.add_argument("--seed", type=int)
    s.add_argument("--samples", type=int, default=4)
    s.add_argument("--method", choices=METHODS, default="random_walk_tree")
    s.add_argument("--cap", type=int, default=14, help="exact-enumeration cap for Steiner subproblems")
    s.add_argument("--root", type=int)
    s.add_argument("--exact", action="store_true", help="solve the Steiner subproblem exactly")
    s.add_argument("--oracle", action="store_true", help="also compute the brute-force optimum")
    s.add_argument("--timings", action="store_true", help="record wall-clock times (breaks byte-identical output)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a report's solution directly")
    v.add_argument("--problem", required=True, choices=PROBLEMS)
    v.add_argument("--input", required=True)
    v.add_argument("--report", required=True)
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle", help="brute-force optimum")
    o.add_argument("--problem", required=True, choices=PROBLEMS)
    o.add_argument("--input", required=True)
    o.add_argument("--output")
    o.add_argument("--cap", type=int, default=12, help="node cap for the enumeration")
    o.set_defaults(func=cmd_oracle)

    u = sub.add_parser("suite", help="run a property suite")
    u.add_argument("--name", required=True, choices=sorted(SUITES) + ["all"])
    u.add_argument("--trials", type=int)
    u.add_argument("--n-max", type=int)
    u.add_argument("--seed", type=int, default=0)
    u.add_argument("--output", help="directory for summary.csv, per-suite JSON and counterexamples")
    u.add_argument("--timings", action="store_true")
    u.set_defaults(func=cmd_suite)

    d = sub.add_parser("export-dot", help="write Graphviz DOT")
    d.add_argument("--input", required=True)
    d.add_argument("--object", choices=["graph", "separability"] + list(KINDS), default="graph")
    d.add_argument("--output")
    d.set_defaults(func=cmd_export_dot)

    r = sub.add_parser("replay", help="re-run the check stored in a counterexample file")
    r.add_argument("--input", required=True)
    r.set_defaults(func=cmd_replay)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantViolation as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return 1
    except (BiconnError, UsageError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
