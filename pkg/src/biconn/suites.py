"""Randomised property suites.

Every trial builds an :class:`~biconn.io.Instance` carrying a ``check`` record and
hands it to :func:`run_check`; a failing instance is therefore its own
replayable certificate.
"""

from __future__ import annotations

import csv
import io as _io
import math
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional

from .crossing import cactus_two_cuts, check_cover_criterion, covers, min_edge_cuts, solve_crossing_aug
from .embedding import SamplerConfig, best_embedding, embeddings
from .errors import BadParams, CapExceeded, Infeasible
from .graph_core import EdgeSet, Graph, Tree, generate, is_two_connected_adj, is_two_connected_edges, random_candidates
from .incidence import augmented_connected, build_incidence, lemma_equiv_check, union_adjacency
from .io import Instance
from .solvers import (
    augmentation_feasible,
    exact_2cds,
    forest_is_tree,
    lift_accounting,
    lift_solution,
    solve_2cds,
    solve_block_tree_aug,
    solve_quota_family,
    two_cds_feasible,
)
from .steiner import NwstInstance, check_bga_properties, nwst_ratio_bound


@dataclass
class Outcome:
    agree: bool
    ratio: Optional[Fraction] = None
    sigma: Optional[Fraction] = None
    log: Dict[str, Any] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# checks (one per property)


def _check_edge_pair(inst: Instance) -> Outcome:
    s, t = inst.check["s"], inst.check["t"]
    r = lemma_equiv_check(inst.tree, inst.edges, s, t, "edge")
    return Outcome(r.agree, log={"lambda_ge_2": r.lhs})


def _check_node_pair(inst: Instance) -> Outcome:
    s, t = inst.check["s"], inst.check["t"]
    r = lemma_equiv_check(inst.tree, inst.edges, s, t, "node")
    log = {"kappa_ge_2": r.lhs}
    adj = inst.check.get("adjacent")
    if adj is not None:
        a = lemma_equiv_check(inst.tree, inst.edges, adj[0], adj[1], "node", allow_adjacent=True)
        log["adjacent_agree"] = a.agree
    return Outcome(r.agree, log=log)


def _check_global(inst: Instance) -> Outcome:
    adj = union_adjacency(inst.tree, inst.edges)
    node = is_two_connected_adj(adj, "node") == augmented_connected(inst.tree, inst.edges, "node")
    edge = is_two_connected_adj(adj, "edge") == augmented_connected(inst.tree, inst.edges, "edge")
    return Outcome(node and edge, log={"node_agree": node, "edge_agree": edge})


def _check_bga(inst: Instance) -> Outcome:
    h = build_incidence(inst.tree, inst.edges, "reduced_FET")
    return Outcome(check_bga_properties(NwstInstance.from_adjacency(h.adj, h.terminals)))


def _check_cover_criterion(inst: Instance) -> Outcome:
    r = check_cover_criterion(inst.family, inst.candidates)
    return Outcome(r.agree, log={"covers": r.covers})


def _check_bta_ratio(inst: Instance) -> Outcome:
    rep = solve_block_tree_aug(inst.tree, inst.edges, oracle=True)
    opt = rep.exact_opt
    bound = nwst_ratio_bound(rep.extra["terminals"])
    ok = (
        augmentation_feasible(inst.tree, rep.chosen, "node")
        and rep.extra["bga_properties"]
        and rep.ratio >= 1
        and rep.ratio <= bound
        and opt >= rep.extra["leaf_lower_bound"]
    )
    return Outcome(ok, ratio=rep.ratio, log={"opt": opt, "bound": bound})


def _check_cds(inst: Instance) -> Outcome:
    g = inst.graph
    cfg = SamplerConfig(inst.check.get("method", "random_walk_tree"), inst.check.get("samples", 3), inst.seed or 0)
    rep = solve_2cds(g, cfg, oracle=True)
    ok = rep.feasible and two_cds_feasible(g, rep.edges) and rep.exact_opt is not None and rep.cost >= rep.exact_opt
    return Outcome(ok, ratio=rep.ratio, sigma=rep.sigma_max, log={"opt": rep.exact_opt})


def _check_lift(inst: Instance) -> Outcome:
    g = inst.graph
    problem = inst.check.get("problem", inst.mode)
    cfg = SamplerConfig(inst.check.get("method", "random_walk_tree"), inst.check.get("samples", 2), inst.seed or 0)
    if problem == "2cds":
        rep = solve_2cds(g, cfg)
    else:
        rep = solve_quota_family(g, inst.mode, inst.target, cfg)
    if not rep.feasible or not rep.chosen:
        return Outcome(True, log={"lifted": False})
    tree = Tree.from_graph(Graph.from_edges(g.n, [g.edge(*k) for k in rep.extra["tree_edges"]]))
    es = EdgeSet(tree, tuple(g.edge(*k) for k in rep.chosen))
    cost, ceiling = lift_accounting(tree, es, rep.sigma_max)
    lifted = lift_solution(tree, es)
    ok = forest_is_tree(tree, es) and is_two_connected_edges(e.key for e in lifted.edges) and cost == rep.cost and cost <= ceiling
    return Outcome(ok, sigma=rep.sigma_max, log={"lifted": True, "problem": problem})


def _check_crossaug(inst: Instance) -> Outcome:
    rep = solve_crossing_aug(inst.family, inst.candidates, oracle=True)
    bound = max(1.0, 2 * math.log(max(rep.extra["cores"], 2)))
    ok = covers(rep.chosen, inst.family)[0] and rep.cost <= bound * rep.exact_opt and rep.cost >= rep.exact_opt
    return Outcome(ok, ratio=rep.ratio, log={"opt": rep.exact_opt})


def _check_stretch(inst: Instance) -> Outcome:
    g = inst.graph
    k = inst.check.get("samples", 4)
    cfg = SamplerConfig(inst.check.get("method", "random_walk_tree"), k, inst.seed or 0)
    sig = [e.sigma_max for e in embeddings(g, cfg)]
    is_tree = g.m == g.n - 1
    is_cycle = g.m == g.n and all(g.degree(v) == 2 for v in g.nodes)
    ok = all((s == 1) == is_tree for s in sig)
    if is_cycle:
        ok = ok and all(s == g.n - 1 for s in sig)
    best = [best_embedding(g, SamplerConfig(cfg.method, j, cfg.seed)).sigma_max for j in range(1, k + 1)]
    ok = ok and all(a >= b for a, b in zip(best, best[1:]))
    return Outcome(ok, sigma=min(sig))


CHECKS: Dict[str, Callable[[Instance], Outcome]] = {
    "lemma2": _check_edge_pair,
    "lemma3": _check_node_pair,
    "global": _check_global,
    "bga": _check_bga,
    "theorem6": _check_cover_criterion,
    "bta_ratio": _check_bta_ratio,
    "cds": _check_cds,
    "lift": _check_lift,
    "crossaug": _check_crossaug,
    "stretch": _check_stretch,
}


def run_check(inst: Instance) -> Outcome:
    name = inst.check.get("property")
    if name not in CHECKS:
        raise BadParams(f"instance carries no known check (got {name!r})")
    return CHECKS[name](inst)


# ---------------------------------------------------------------------------
# instance generators (one per suite)


def _sub_seed(rng: random.Random) -> int:
    return rng.randrange(2**31)


def _random_tree(rng: random.Random, n_min: int, n_max: int) -> Tree:
    n = rng.randint(n_min, n_max)
    return Tree.from_graph(generate("random_tree", {"n": n}, _sub_seed(rng)))


def _tree_pair(rng, n_max, max_f=8) -> Instance:
    tree = _random_tree(rng, 3, n_max)
    edges = random_candidates(tree, rng.randint(0, max_f), rng)
    return Instance("bta", tree=tree, edges=edges)


def _gen_edge_pair(rng, p) -> Instance:
    inst = _tree_pair(rng, p["n_max"])
    s, t = rng.sample(range(inst.tree.n), 2)
    inst.check = {"property": "lemma2", "s": s, "t": t}
    return inst


def _gen_node_pair(rng, p) -> Instance:
    inst = _tree_pair(rng, p["n_max"])
    tree = inst.tree
    pairs = [(s, t) for s in tree.nodes for t in tree.nodes if s < t and not tree.has_edge(s, t)]
    s, t = rng.choice(pairs)
    if rng.random() < 0.5:
        s, t = t, s
    adj = rng.choice(tree.edges)
    inst.check = {"property": "lemma3", "s": s, "t": t, "adjacent": [adj.u, adj.v]}
    return inst


def _gen_global(rng, p) -> Instance:
    inst = _tree_pair(rng, p["n_max"])
    inst.check = {"property": "global"}
    return inst


def _gen_bga(rng, p) -> Instance:
    inst = _tree_pair(rng, p["n_max"], 12)
    inst.check = {"property": "bga"}
    return inst


def _dfs_leaves(tree: Tree) -> List[int]:
    order, stack, seen = [], [0], {0}
    while stack:
        x = stack.pop()
        order.append(x)
        for y in sorted(tree.adj[x], reverse=True):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return [v for v in order if tree.degree(v) == 1]


def feasible_candidates(tree: Tree, rng: random.Random, extra: int) -> EdgeSet:
    """Random candidates, topped up with a cycle through the leaves so that ``T + E`` is 2-connected."""
    es = random_candidates(tree, extra, rng)
    if augmentation_feasible(tree, es, "node"):
        return es
    leaves = _dfs_leaves(tree)
    ring = [(leaves[i], leaves[(i + 1) % len(leaves)]) for i in range(len(leaves))] if len(leaves) > 2 else [tuple(leaves)]
    return EdgeSet.for_tree(tree, list(es.keys) + [r for r in ring if not tree.has_edge(*r)])


def _gen_bta_ratio(rng, p) -> Instance:
    tree = _random_tree(rng, max(3, p.get("n_min", 3)), p["n_max"])
    es = feasible_candidates(tree, rng, rng.randint(0, p.get("extra", 10)))
    return Instance("bta", tree=tree, edges=es, check={"property": "bta_ratio"})


def _gen_cds(rng, p) -> Instance:
    for _ in range(50):
        n = rng.randint(4, p["n_max"])
        g = generate("gnp", {"n": n, "p": rng.uniform(0.25, 0.8), "connected": True}, _sub_seed(rng))
        try:
            exact_2cds(g)
        except Infeasible:
            continue
        return Instance("graph", seed=_sub_seed(rng), graph=g, check={"property": "cds", "samples": p.get("samples", 3)})
    raise BadParams("could not draw a graph with a 2-connected dominating subgraph")


def _gen_lift(rng, p) -> Instance:
    n = rng.randint(4, min(p["n_max"], 8))
    problem = rng.choice(["k_subgraph", "quota", "budget", "2cds"])
    # 2CDS counts edges, so its instances stay unit-cost
    costs = None if problem == "2cds" else (1, 6)
    g = generate("gnp", {"n": n, "p": rng.uniform(0.35, 0.9), "connected": True, "costs": costs, "profits": (1, 5)}, _sub_seed(rng))
    mode = "k_subgraph" if problem == "2cds" else problem
    if mode == "k_subgraph":
        target = Fraction(rng.randint(3, n))
    elif mode == "quota":
        target = Fraction(rng.randint(1, max(1, int(sum(g.node_profits)) // 2)))
    else:
        target = Fraction(rng.randint(3, 18))
    return Instance("quota", seed=_sub_seed(rng), graph=g, mode=mode, target=target, check={"property": "lift", "problem": problem, "samples": 2})


def _gen_cover_criterion(rng, p, index) -> Instance:
    if index % 2 == 0:
        n = rng.randint(3, min(p["n_max"], 10))
        mc = rng.randint(3, 6)
        if mc == 3 and n % 2 == 0:
            mc = 4
        fam = cactus_two_cuts(generate("random_cactus", {"n": n, "max_cycle": mc}, _sub_seed(rng)))
    else:
        n = rng.randint(3, min(p["n_max"], 8))
        g = generate("gnp", {"n": n, "p": rng.uniform(0.3, 0.9), "connected": True}, _sub_seed(rng))
        fam = min_edge_cuts(g)
    pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
    J = sorted(rng.sample(pool, rng.randint(0, min(len(pool), p.get("max_j", 8)))))
    return Instance("family", family=fam, candidates=tuple(J), check={"property": "theorem6"})


def _gen_crossaug(rng, p) -> Instance:
    cap = p.get("max_e", 18)
    while True:
        n = rng.randint(4, min(p["n_max"], 10))
        fam = cactus_two_cuts(generate("random_cactus", {"n": n, "max_cycle": rng.randint(4, 6)}, _sub_seed(rng)))
        pool = [(u, v) for u in range(n) for v in range(u + 1, n)]
        rng.shuffle(pool)
        E = pool[: rng.randint(2, 10)]
        rest = pool[len(E):]
        while True:
            ok, witness = covers(E, fam)
            if ok:
                break
            pick = next(e for e in rest if (e[0] in witness) != (e[1] in witness))
            rest.remove(pick)
            E.append(pick)
        if len(E) <= cap:
            return Instance("family", family=fam, candidates=tuple(sorted(E)), check={"property": "crossaug"})


def _gen_stretch(rng, p, index) -> Instance:
    n = rng.randint(3, p.get("n_max_cycle", 64))
    kind = ("cycle", "random_tree", "gnp")[index % 3]
    params = {"n": n} if kind != "gnp" else {"n": min(n, 20), "p": 0.3, "connected": True}
    g = generate(kind, params, _sub_seed(rng))
    method = ("random_walk_tree", "perturbed_mst", "bfs_random_root")[(index // 3) % 3]
    return Instance("graph", seed=_sub_seed(rng), graph=g, check={"property": "stretch", "samples": 4, "method": method})


@dataclass(frozen=True)
class Suite:
    name: str
    make: Callable
    defaults: Dict[str, Any]
    needs_index: bool = False


SUITES: Dict[str, Suite] = {
    "lemma2": Suite("lemma2", _gen_edge_pair, {"trials": 2000, "n_max": 12}),
    "lemma3": Suite("lemma3", _gen_node_pair, {"trials": 2000, "n_max": 12}),
    "global": Suite("global", _gen_global, {"trials": 1000, "n_max": 12}),
    "bga": Suite("bga", _gen_bga, {"trials": 500, "n_max": 12}),
    "theorem6": Suite("theorem6", _gen_cover_criterion, {"trials": 500, "n_max": 10}, True),
    "ratio_bench": Suite("ratio_bench", _gen_bta_ratio, {"trials": 200, "n_max": 12}),
    "cds_bench": Suite("cds_bench", _gen_cds, {"trials": 100, "n_max": 8}),
    "lift": Suite("lift", _gen_lift, {"trials": 400, "n_max": 8}),
    "cross_bench": Suite("cross_bench", _gen_crossaug, {"trials": 100, "n_max": 10}),
    "stretch": Suite("stretch", _gen_stretch, {"trials": 60, "n_max": 64}, True),
}


def make_instance(name: str, params: Dict[str, Any], seed: int, index: int) -> Instance:
    suite = SUITES[name]
    rng = random.Random(f"{name}/{seed}/{index}")
    inst = suite.make(rng, params, index) if suite.needs_index else suite.make(rng, params)
    if inst.seed is None:
        inst.seed = seed
    inst.check = {**inst.check, "suite": name, "trial": index}
    return inst


def _trial(args):
    name, params, seed, index = args
    inst = make_instance(name, params, seed, index)
    return inst, run_check(inst)


@dataclass
class SuiteResult:
    name: str
    instances: int
    agreements: int
    ratios: List[Fraction]
    sigmas: List[Fraction]
    failures: List[Instance]
    notes: Dict[str, Any]
    wall_ms: float

    @property
    def passed(self) -> bool:
        return self.agreements == self.instances

    def row(self, timings: bool = False) -> Dict[str, Any]:
        def fmt(x):
            return "" if x is None else f"{float(x):.6f}"

        mean = sum(self.ratios, Fraction(0)) / len(self.ratios) if self.ratios else None
        sig = sum(self.sigmas, Fraction(0)) / len(self.sigmas) if self.sigmas else None
        return {
            "suite": self.name,
            "instances": self.instances,
            "agreements": self.agreements,
            "mean_ratio": fmt(mean),
            "max_ratio": fmt(max(self.ratios) if self.ratios else None),
            "sigma_max_mean": fmt(sig),
            "wall_ms": f"{self.wall_ms:.1f}" if timings else "",
        }


CSV_COLUMNS = ["suite", "instances", "agreements", "mean_ratio", "max_ratio", "sigma_max_mean", "wall_ms"]


def summary_csv(results: List[SuiteResult], timings: bool = False) -> str:
    buf = _io.StringIO()
    w = csv.DictWriter(buf, CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerow(r.row(timings))
    return buf.getvalue()


def thread_cap() -> int:
    raw = os.environ.get("BICONN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise BadParams(f"BICONN_THREADS must be an integer, got {raw!r}") from None


def run_suite(name: str, params: Optional[Dict[str, Any]] = None, seed: int = 0, threads: Optional[int] = None) -> SuiteResult:
    """Run ``trials`` independent trials; results are merged in trial order."""
    if name not in SUITES:
        raise BadParams(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    p = {**SUITES[name].defaults, **{k: v for k, v in (params or {}).items() if v is not None}}
    if name == "ratio_bench" and p["n_max"] > 12:
        raise CapExceeded("ratio_bench oracle cap n <= 12")
    if name == "cds_bench" and p["n_max"] > 8:
        raise CapExceeded("cds_bench oracle cap n <= 8")
    threads = min(threads or thread_cap(), thread_cap())
    jobs = [(name, p, seed, i) for i in range(p["trials"])]
    t0 = time.perf_counter()
    if threads > 1:
        with ProcessPoolExecutor(threads) as pool:
            results = list(pool.map(_trial, jobs, chunksize=max(1, len(jobs) // (threads * 4))))
    else:
        results = [_trial(j) for j in jobs]
    wall = (time.perf_counter() - t0) * 1000
    agreements = sum(1 for _, o in results if o.agree)
    ratios = [o.ratio for _, o in results if o.ratio is not None]
    sigmas = [o.sigma for _, o in results if o.sigma is not None]
    failures = [inst for inst, o in results if not o.agree]
    notes: Dict[str, Any] = {}
    if name == "lemma3":
        adj = [o.log["adjacent_agree"] for _, o in results if "adjacent_agree" in o.log]
        notes["adjacent_pairs"] = len(adj)
        notes["adjacent_disagreements"] = adj.count(False)
    if name == "lift":
        notes["lifted"] = sum(1 for _, o in results if o.log.get("lifted"))
        notes["weighted_lifted"] = sum(1 for _, o in results if o.log.get("lifted") and o.log.get("problem") != "2cds")
    if name == "theorem6":
        notes["covering_samples"] = sum(1 for _, o in results if o.log.get("covers"))
    return SuiteResult(name, len(results), agreements, ratios, sigmas, failures, notes, wall)
