"""End-to-end pipelines: embed in a spanning tree, reduce to a Steiner-type
instance on an incidence graph, solve, lift back and verify directly.

Each pipeline has a brute-force counterpart (``exact_*``) that never touches
the reductions; they are what the reported ratios are measured against.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations, permutations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .embedding import SamplerConfig, embeddings
from .errors import BadParams, CapExceeded, EmptySolution, Infeasible, InvariantViolation
from .graph_core import (
    Edge,
    EdgeSet,
    Graph,
    Key,
    Tree,
    adjacency_from_edges,
    as_edge_set,
    block_cut_tree,
    connected_components,
    covered_forest,
    dominates,
    is_connected,
    is_two_connected_adj,
    is_two_connected_edges,
    key,
)
from .incidence import build_incidence, is_link, link
from .steiner import (
    GroupSteinerInstance,
    NwstInstance,
    QuotaSubtreeInstance,
    check_bga_properties,
    group_steiner_greedy,
    nwst_exact_small,
    nwst_greedy,
    nwst_ratio_bound,
    quota_subtree,
)

BTA_BOUND = (1.91, "unit-weight NWST with clique terminal neighbourhoods: 2 ln 4 + 967/1120 + eps")
CROSS_BOUND = BTA_BOUND
CDS_BOUND = (None, "O(sigma log^3 n) via group Steiner rounding")
KSUB_BOUND = (None, "O(sigma log k)")
QUOTA_BOUND = (None, "O(sigma log n)")
BUDGET_BOUND = (None, "bi-criteria ((1+eps) sigma, Omega(eps^2 / log n))")
TAEC_BOUND = (None, "O(ln |R|) greedy NWST")

AUG_CAP_N = 12
AUG_CAP_E = 24
CDS_CAP_N = 8
QUOTA_CAP_M = 16


@dataclass
class SolutionReport:
    problem: str
    feasible: bool
    chosen: Tuple[Key, ...] = ()
    nodes: Tuple[int, ...] = ()
    edges: Tuple[Key, ...] = ()
    cost: Fraction = Fraction(0)
    reduced_cost: Fraction = Fraction(0)
    sigma_max: Optional[Fraction] = None
    exact_opt: Optional[Fraction] = None
    ratio: Optional[Fraction] = None
    reference_ratio_bound: Optional[float] = None
    reference_bound_tag: Optional[str] = None
    seed: Optional[int] = None
    config: Dict = field(default_factory=dict)
    extra: Dict = field(default_factory=dict)
    wall_ms: Optional[float] = None

    def with_opt(self, opt) -> "SolutionReport":
        opt = Fraction(opt)
        if opt == 0:
            ratio = Fraction(1) if self.cost == 0 else None
        else:
            ratio = Fraction(self.cost) / opt
        return replace(self, exact_opt=opt, ratio=ratio)


# ---------------------------------------------------------------------------
# lifting


def lift_solution(tree: Tree, edges) -> Graph:
    """``T_F + F`` on the node ids of ``tree`` (nodes off the solution are isolated)."""
    es = as_edge_set(tree, edges)
    if not len(es):
        raise EmptySolution("nothing to lift")
    forest = covered_forest(tree, es)
    return Graph(tree.n, tuple(sorted(forest.edges + es.edges, key=lambda e: e.key)))


def solution_nodes(g: Graph) -> Tuple[int, ...]:
    return tuple(v for v in g.nodes if g.adj[v])


def forest_is_tree(tree: Tree, edges) -> bool:
    forest = covered_forest(tree, edges)
    adj = adjacency_from_edges(e.key for e in forest.edges)
    return len(adj) > 0 and len(connected_components(adj)) == 1


def graph_cost(g: Graph) -> Fraction:
    return sum((e.cost for e in g.edges), Fraction(0))


def lift_accounting(tree: Tree, edges, sigma_max) -> Tuple[Fraction, Fraction]:
    """Lifted cost and its ``(sigma + 1) * c(F)`` ceiling."""
    es = as_edge_set(tree, edges)
    return graph_cost(lift_solution(tree, es)), (Fraction(sigma_max) + 1) * es.cost()


def _two_connected(g: Graph, mode: str = "node") -> bool:
    return is_two_connected_edges((e.key for e in g.edges), mode)


def _now() -> float:
    return time.perf_counter()


def _elapsed(t0: float) -> float:
    return round((time.perf_counter() - t0) * 1000, 3)


# ---------------------------------------------------------------------------
# block-tree augmentation and its 2-edge-connected cousin


def augmentation_feasible(tree: Tree, edges, mode: str = "node") -> bool:
    es = as_edge_set(tree, edges)
    adj = adjacency_from_edges([e.key for e in tree.edges] + list(es.keys), tree.nodes)
    return is_two_connected_adj(adj, mode)


def _chosen_links(inst: NwstInstance, nodes: Iterable[int]) -> List[Key]:
    out = []
    for v in nodes:
        lab = inst.label(v)
        if is_link(lab):
            out.append((lab[1], lab[2]))
    return sorted(out)


def solve_block_tree_aug(tree: Tree, edges, *, exact: bool = False, oracle: bool = False, cap: int = 20) -> SolutionReport:
    """Min-size ``F`` with ``T + F`` 2-connected, via the reduced (E, E_T)-incidence graph."""
    t0 = _now()
    if tree.n < 3:
        raise BadParams("block-tree augmentation needs a tree with at least 3 nodes")
    es = as_edge_set(tree, [(e.u, e.v) for e in as_edge_set(tree, edges)])
    if not augmentation_feasible(tree, es, "node"):
        raise Infeasible("T + E is not 2-connected")
    h = build_incidence(tree, es, "reduced_FET")
    inst = NwstInstance.from_adjacency(h.adj, h.terminals)
    if not check_bga_properties(inst):
        raise InvariantViolation("reduced (E, E_T)-incidence instance lost its clique/degree structure")
    sol = nwst_exact_small(inst, cap) if exact else nwst_greedy(inst)
    chosen = _chosen_links(inst, sol.nodes)
    if not augmentation_feasible(tree, chosen, "node"):
        raise InvariantViolation("NWST solution does not 2-connect the tree")
    leaves = len(tree.leaves)
    report = SolutionReport(
        "bta",
        True,
        tuple(chosen),
        tuple(tree.nodes),
        tuple(sorted([e.key for e in tree.edges] + chosen)),
        Fraction(len(chosen)),
        Fraction(len(chosen)),
        reference_ratio_bound=BTA_BOUND[0],
        reference_bound_tag=BTA_BOUND[1],
        config={"exact": exact},
        extra={
            "leaves": leaves,
            "terminals": len(inst.terminals),
            "leaf_lower_bound": math.ceil(leaves / 2),
            "bga_properties": True,
            "greedy_bound": nwst_ratio_bound(len(inst.terminals)),
        },
    )
    if oracle:
        opt, _ = exact_augmentation(tree, es, "node")
        report = report.with_opt(opt)
    report.wall_ms = _elapsed(t0)
    return report


def solve_tree_aug_ec(tree: Tree, edges, *, exact: bool = False, oracle: bool = False, cap: int = 20) -> SolutionReport:
    """Min-cost ``F`` with ``T + F`` 2-edge-connected, via the reduced (E, V)-incidence graph."""
    t0 = _now()
    if tree.n < 3:
        raise BadParams("tree augmentation needs a tree with at least 3 nodes")
    es = as_edge_set(tree, edges)
    if not augmentation_feasible(tree, es, "edge"):
        raise Infeasible("T + E is not 2-edge-connected")
    costs = {link(e.key): e.cost for e in es}
    h = build_incidence(tree, es, "reduced_FV")
    inst = NwstInstance.from_adjacency(h.adj, h.terminals, weight=lambda x: costs[x])
    sol = nwst_exact_small(inst, cap) if exact else nwst_greedy(inst)
    chosen = _chosen_links(inst, sol.nodes)
    if not augmentation_feasible(tree, chosen, "edge"):
        raise InvariantViolation("NWST solution does not 2-edge-connect the tree")
    cost = es.subset(chosen).cost()
    report = SolutionReport(
        "taec",
        True,
        tuple(chosen),
        tuple(tree.nodes),
        tuple(sorted([e.key for e in tree.edges] + chosen)),
        cost,
        cost,
        reference_bound_tag=TAEC_BOUND[1],
        config={"exact": exact},
        extra={"terminals": len(inst.terminals), "greedy_bound": nwst_ratio_bound(len(inst.terminals))},
    )
    if oracle:
        opt, _ = exact_augmentation(tree, es, "edge", objective="cost")
        report = report.with_opt(opt)
    report.wall_ms = _elapsed(t0)
    return report


def exact_augmentation(tree: Tree, edges, mode: str = "node", objective: str = "size", cap_n: int = AUG_CAP_N, cap_e: int = AUG_CAP_E) -> Tuple[Fraction, Tuple[Key, ...]]:
    """Optimal augmentation by enumerating candidate subsets in increasing size."""
    es = as_edge_set(tree, edges)
    if tree.n > cap_n or len(es) > cap_e:
        raise CapExceeded(f"augmentation oracle caps: n <= {cap_n}, |E| <= {cap_e}")
    if not augmentation_feasible(tree, es, mode):
        raise Infeasible("T + E is not 2-connected" if mode == "node" else "T + E is not 2-edge-connected")
    cost = {e.key: (Fraction(1) if objective == "size" else e.cost) for e in es}
    ordered = sorted(cost.values())
    keys = list(es.keys)
    best: Optional[Tuple[Fraction, Tuple[Key, ...]]] = None
    bound = Fraction(0)
    for k in range(len(keys) + 1):
        if k:
            bound += ordered[k - 1]
        if best is not None and bound >= best[0]:
            break
        for combo in combinations(keys, k):
            c = sum((cost[f] for f in combo), Fraction(0))
            if best is not None and c >= best[0]:
                continue
            if augmentation_feasible(tree, combo, mode):
                best = (c, combo)
    return best


# ---------------------------------------------------------------------------
# reduction of a connected graph to block-tree augmentation


@dataclass(frozen=True)
class BlockTreeReduction:
    tree: Tree
    edges: EdgeSet
    origin: Dict[Key, Tuple[Key, ...]]  # block-tree candidate -> original candidate edges
    cut_nodes: Tuple[int, ...] = ()

    def two_connects(self, chosen: Iterable[Key]) -> bool:
        """Does ``chosen`` keep the tree plus links connected without any one cut node?

        Block nodes stand for whole blocks, so removing one has no counterpart in
        the original graph; only cut nodes are tested.
        """
        adj = {v: set(self.tree.adj[v]) for v in self.tree.nodes}
        for u, v in chosen:
            adj[u].add(v)
            adj[v].add(u)
        for c in self.cut_nodes:
            start = next(v for v in self.tree.nodes if v != c)
            seen, stack = {c, start}, [start]
            while stack:
                for y in adj[stack.pop()]:
                    if y not in seen:
                        seen.add(y)
                        stack.append(y)
            if len(seen) < self.tree.n:
                return False
        return True


def reduce_to_block_tree(g: Graph, candidates: Iterable[Tuple[int, int]]) -> BlockTreeReduction:
    """Map candidates for 2-connecting ``g`` onto its block-cut tree.

    A node that is not a cut vertex sits on its unique block's tree node; a cut
    vertex on its own.  Candidates whose images coincide or form a tree edge
    can never help and are dropped.  Plain 2-connectivity of the tree plus links
    is stronger than needed; use ``two_connects`` for the exact criterion.
    """
    bct = block_cut_tree(g)
    where = {}
    for i, block in enumerate(bct.blocks):
        for v in block:
            where.setdefault(v, i)
    for c in bct.cut_vertices:
        where[c] = bct.cut_node(c)
    origin: Dict[Key, List[Key]] = {}
    for u, v in candidates:
        a, b = where[u], where[v]
        if a == b or bct.tree.has_edge(a, b):
            continue
        origin.setdefault(key(a, b), []).append(key(u, v))
    es = EdgeSet.for_tree(bct.tree, sorted(origin))
    cuts = tuple(bct.cut_node(c) for c in bct.cut_vertices)
    return BlockTreeReduction(bct.tree, es, {k: tuple(sorted(v)) for k, v in origin.items()}, cuts)


# ---------------------------------------------------------------------------
# 2-connected dominating set


def dominated_by(g: Graph, v: int, nodes: Set[int]) -> bool:
    return v in nodes or bool(g.adj[v] & nodes)


@dataclass(frozen=True)
class SscdsInstance:
    adj: Dict[Tuple, FrozenSet[Tuple]]
    terminals: FrozenSet[Tuple]
    groups: GroupSteinerInstance
    links: Tuple[Key, ...]  # group-Steiner node id -> candidate edge


def build_sscds(tree: Tree, edges) -> SscdsInstance:
    """Subset Steiner connected dominating set instance on ``V + E``.

    ``v ~ f`` when ``v`` lies on, or has a neighbour in ``T + E`` on, the tree
    path of ``f``; ``f ~ g`` when their tree paths share a tree edge.  The
    group Steiner form keeps only the link nodes, with one group per ``v``.
    """
    if tree.n < 3:
        raise BadParams("needs a tree with at least 3 nodes")
    es = as_edge_set(tree, edges)
    g = Graph(tree.n, tuple(sorted(tree.edges + es.edges, key=lambda e: e.key)))
    links = es.keys
    path_nodes = {f: set(tree.path_nodes(*f)) for f in links}
    path_edges = {f: set(tree.path(*f)) for f in links}
    adj: Dict[Tuple, Set[Tuple]] = {("v", v): set() for v in tree.nodes}
    for f in links:
        adj[link(f)] = set()
    groups = []
    for v in tree.nodes:
        grp = set()
        for i, f in enumerate(links):
            if dominated_by(g, v, path_nodes[f]):
                adj[("v", v)].add(link(f))
                adj[link(f)].add(("v", v))
                grp.add(i)
        if not grp:
            raise Infeasible(f"node {v} is dominated by no tree path")
        groups.append(frozenset(grp))
    conn = []
    for (i, f), (j, h) in combinations(enumerate(links), 2):
        if path_edges[f] & path_edges[h]:
            adj[link(f)].add(link(h))
            adj[link(h)].add(link(f))
            conn.append((i, j))
    gs = GroupSteinerInstance(Graph.from_edges(len(links), conn), tuple(groups), tuple(link(f) for f in links))
    return SscdsInstance(
        {k: frozenset(v) for k, v in sorted(adj.items())},
        frozenset(("v", v) for v in tree.nodes),
        gs,
        links,
    )


def sscds_feasible(inst: SscdsInstance, chosen: Iterable[Key]) -> bool:
    """``F`` induces a connected subgraph of link nodes that dominates every terminal."""
    nodes = {link(f) for f in chosen}
    if not nodes:
        return False
    sub = {x: [y for y in inst.adj[x] if y in nodes] for x in nodes}
    if len(connected_components(sub)) != 1:
        return False
    return all(inst.adj[t] & nodes for t in inst.terminals)


def dominating_block_tree_feasible(g: Graph, tree: Tree, chosen: Iterable[Key]) -> bool:
    """Direct check: ``T_F`` is a tree dominating ``g`` and ``T_F + F`` is 2-connected."""
    chosen = list(chosen)
    if not chosen:
        return False
    es = EdgeSet(tree, tuple(sorted((g.edge(*f) for f in chosen), key=lambda e: e.key)))
    if not forest_is_tree(tree, es):
        return False
    lifted = lift_solution(tree, es)
    return _two_connected(lifted) and dominates(g, solution_nodes(lifted))


def two_cds_feasible(g: Graph, edges: Iterable[Key]) -> bool:
    edges = list(edges)
    nodes = {v for e in edges for v in e}
    return is_two_connected_edges(edges, "node") and dominates(g, nodes)


def _solve_groups(gs: GroupSteinerInstance) -> Optional[FrozenSet[int]]:
    smallest = min(range(len(gs.groups)), key=lambda i: (len(gs.groups[i]), i))
    best = None
    for root in sorted(gs.groups[smallest]):
        try:
            nodes = group_steiner_greedy(gs, root)
        except Infeasible:
            continue
        if best is None or len(nodes) < len(best):
            best = nodes
    return best


def _prune_links(check, chosen: List[Key]) -> List[Key]:
    """Reverse-delete: drop links one at a time while the direct check still passes."""
    chosen = sorted(chosen)
    for f in sorted(chosen, reverse=True):
        trial = [h for h in chosen if h != f]
        if trial and check(trial):
            chosen = trial
    return chosen


def solve_2cds(g: Graph, config: SamplerConfig = SamplerConfig(), *, oracle: bool = False, prune: bool = True) -> SolutionReport:
    """2-connected dominating subgraph with few edges, best over sampled spanning trees."""
    t0 = _now()
    if g.n < 3 or not is_connected(g):
        raise BadParams("2CDS needs a connected graph on at least 3 nodes")
    unit = Graph(g.n, tuple(Edge(e.u, e.v, Fraction(1)) for e in g.edges))
    best = None
    samples = []
    for emb in embeddings(unit, config):
        tree = emb.tree
        es = EdgeSet(tree, tuple(e for e in unit.edges if not tree.has_edge(*e.key)))
        try:
            inst = build_sscds(tree, es)
        except Infeasible:
            samples.append({"index": emb.index, "sigma_max": emb.sigma_max, "edges": None})
            continue
        nodes = _solve_groups(inst.groups)
        if nodes is None:
            samples.append({"index": emb.index, "sigma_max": emb.sigma_max, "edges": None})
            continue
        chosen = sorted(inst.links[i] for i in nodes)
        if not sscds_feasible(inst, chosen):
            raise InvariantViolation("group Steiner output is not a feasible SSCDS solution")
        if prune:
            chosen = _prune_links(lambda fs: dominating_block_tree_feasible(unit, tree, fs), chosen)
        lifted = lift_solution(tree, es.subset(chosen))
        lifted_keys = tuple(e.key for e in lifted.edges)
        if not two_cds_feasible(g, lifted_keys):
            raise InvariantViolation("lifted 2CDS solution failed the direct check")
        samples.append({"index": emb.index, "sigma_max": emb.sigma_max, "edges": len(lifted_keys)})
        cand = (len(lifted_keys), emb.index)
        if best is None or cand < best[0]:
            best = (cand, emb, chosen, lifted)
    if best is None:
        report = SolutionReport("2cds", False, reference_bound_tag=CDS_BOUND[1], seed=config.seed, config=config.as_dict(), extra={"samples": samples})
        if oracle and g.n <= CDS_CAP_N:
            try:
                exact_2cds(g)
                report.extra["oracle_feasible"] = True
            except Infeasible:
                report.extra["oracle_feasible"] = False
        report.wall_ms = _elapsed(t0)
        return report
    _, emb, chosen, lifted = best
    nodes = solution_nodes(lifted)
    report = SolutionReport(
        "2cds",
        True,
        tuple(chosen),
        nodes,
        tuple(e.key for e in lifted.edges),
        Fraction(lifted.m),
        Fraction(len(chosen)),
        emb.sigma_max,
        reference_bound_tag=CDS_BOUND[1],
        seed=config.seed,
        config=config.as_dict(),
        extra={"num_nodes": len(nodes), "sample_index": emb.index, "samples": samples, "tree_edges": [e.key for e in emb.tree.edges]},
    )
    if oracle:
        opt_edges, opt_nodes, _ = exact_2cds(g)
        report = report.with_opt(opt_edges)
        report.extra["opt_nodes"] = opt_nodes
    report.wall_ms = _elapsed(t0)
    return report


def _hamiltonian(nodes: Sequence[int], adj) -> bool:
    first, rest = nodes[0], list(nodes[1:])
    for perm in permutations(rest):
        if perm and perm[0] > perm[-1]:
            continue
        cycle = (first,) + perm
        if all(cycle[(i + 1) % len(cycle)] in adj[cycle[i]] for i in range(len(cycle))):
            return True
    return False


def min_two_connected_spanning_edges(g: Graph, nodes: Sequence[int], upper: Optional[int] = None) -> Optional[int]:
    """Fewest edges of a 2-connected spanning subgraph of ``g[nodes]`` (None if above ``upper``)."""
    nodes = sorted(nodes)
    inside = set(nodes)
    sub_edges = [e.key for e in g.edges if e.u in inside and e.v in inside]
    adj = adjacency_from_edges(sub_edges, nodes)
    if not is_two_connected_adj(adj):
        return None
    s = len(nodes)
    if upper is not None and upper < s:
        return None
    if _hamiltonian(nodes, adj):
        return s
    top = len(sub_edges) if upper is None else min(upper, len(sub_edges))
    for k in range(s + 1, top + 1):
        for combo in combinations(sub_edges, k):
            deg = dict.fromkeys(nodes, 0)
            for a, b in combo:
                deg[a] += 1
                deg[b] += 1
            if min(deg.values()) < 2:
                continue
            if is_two_connected_edges(combo):
                return k
    return None


def exact_2cds(g: Graph, cap_n: int = CDS_CAP_N) -> Tuple[int, int, Tuple[int, ...]]:
    """(min edges, min nodes, node set attaining min edges) of a 2-connected dominating subgraph."""
    if g.n > cap_n:
        raise CapExceeded(f"2CDS oracle cap n <= {cap_n}")
    adj = g.adjacency()
    best_edges: Optional[Tuple[int, Tuple[int, ...]]] = None
    best_nodes: Optional[int] = None
    for size in range(3, g.n + 1):
        if best_edges is not None and best_edges[0] <= size:
            break
        for sub in combinations(g.nodes, size):
            if not dominates(g, sub):
                continue
            inside = set(sub)
            sub_adj = {v: adj[v] & inside for v in sub}
            if not is_two_connected_adj(sub_adj):
                continue
            if best_nodes is None:
                best_nodes = size
            upper = None if best_edges is None else best_edges[0] - 1
            m = min_two_connected_spanning_edges(g, sub, upper)
            if m is not None and (best_edges is None or m < best_edges[0]):
                best_edges = (m, sub)
    if best_edges is None:
        raise Infeasible("no 2-connected dominating subgraph")
    return best_edges[0], best_nodes, best_edges[1]


# ---------------------------------------------------------------------------
# k-subgraph / quota / budget

QUOTA_FAMILY = ("k_subgraph", "quota", "budget")


def node_profit(g: Graph, nodes: Iterable[int]) -> Fraction:
    return sum((g.profit(v) for v in nodes), Fraction(0))


def _roots(g: Graph, config: SamplerConfig, root_cap: int) -> List[int]:
    if g.n <= root_cap:
        return list(g.nodes)
    import random

    return sorted(random.Random(f"roots/{config.seed}").sample(range(g.n), root_cap))


def _quota_candidates(g: Graph, tree: Tree, es: EdgeSet, mode: str, target: Fraction, root_list, exact_cap: int):
    """Yield (root, chosen link keys) candidates for one sampled tree."""
    costs = {link(e.key): e.cost for e in es}
    h = build_incidence(tree, es, "shortcut_FET")
    nw = NwstInstance.from_adjacency(h.adj, h.terminals, weight=lambda x: costs[x])
    index = {lab: i for i, lab in enumerate(nw.labels)}
    if mode == "k_subgraph":
        k = max(int(target), 3)
        q = QuotaSubtreeInstance.build(nw, "count", k - 1)
        try:
            sol = quota_subtree(q, cap=exact_cap)
        except Infeasible:
            return
        yield None, _chosen_links(nw, sol.nodes)
        return
    for s in root_list:
        parent = tree.parents(s)
        profits = {}
        for e in tree.edges:
            child = e.u if parent[e.u] == e.v else e.v
            profits[index[("e", e.u, e.v)]] = g.profit(child)
        anchors = [index[link(f.key)] for f in es if s in tree.path_nodes(f.u, f.v)]
        if not anchors:
            continue
        if mode == "quota":
            rest = target - g.profit(s)
            if rest <= 0:
                cheapest = min(anchors, key=lambda a: (nw.weights[a], a))
                yield s, _chosen_links(nw, [cheapest])
                continue
            q = QuotaSubtreeInstance.build(nw, "quota", rest, profits, anchors)
            try:
                sol = quota_subtree(q, cap=exact_cap)
            except Infeasible:
                continue
            yield s, _chosen_links(nw, sol.nodes)
        else:
            q = QuotaSubtreeInstance.build(nw, "budget", target, profits, anchors)
            sol = quota_subtree(q, exact=False)
            picked = [v for v in sol.order if v not in nw.terminals]
            # every prefix of the greedy insertion order is itself a connected link set
            for j in range(len(picked), 0, -1):
                yield s, _chosen_links(nw, picked[:j])


def solve_quota_family(
    g: Graph,
    mode: str,
    target,
    config: SamplerConfig = SamplerConfig(),
    *,
    root: Optional[int] = None,
    oracle: bool = False,
    exact_cap: int = 14,
    root_cap: int = 12,
) -> SolutionReport:
    """Min-cost 2-connected subgraph with >= k nodes / profit >= Q, or max profit within budget B.

    Node profits come from ``g.node_profits`` (1 per node when absent).
    """
    t0 = _now()
    if mode not in QUOTA_FAMILY:
        raise BadParams(f"unknown mode {mode!r}")
    if not is_connected(g):
        raise BadParams("graph must be connected")
    target = Fraction(target)
    tag = {"k_subgraph": KSUB_BOUND, "quota": QUOTA_BOUND, "budget": BUDGET_BOUND}[mode][1]
    base = dict(reference_bound_tag=tag, seed=config.seed, config={**config.as_dict(), "mode": mode, "target": target, "root": root})
    if (mode == "k_subgraph" and target <= 0) or (mode != "k_subgraph" and target <= 0):
        report = SolutionReport(mode, True, extra={"profit": Fraction(0), "empty": True}, **base)
        if oracle:
            report = report.with_opt(0)
        report.wall_ms = _elapsed(t0)
        return report
    root_list = [root] if root is not None else _roots(g, config, root_cap)
    best = None
    samples = []
    for emb in embeddings(g, config):
        tree = emb.tree
        es = EdgeSet(tree, tuple(e for e in g.edges if not tree.has_edge(*e.key)))
        if not len(es):
            samples.append({"index": emb.index, "sigma_max": emb.sigma_max, "cost": None})
            continue
        sample_best = None
        for s, chosen in _quota_candidates(g, tree, es, mode, target, root_list, exact_cap):
            if not chosen:
                continue
            sub = es.subset(chosen)
            lifted = lift_solution(tree, sub)
            nodes = solution_nodes(lifted)
            cost = graph_cost(lifted)
            profit = node_profit(g, nodes)
            if not _two_connected(lifted):
                raise InvariantViolation("lifted subgraph is not 2-connected")
            if mode == "k_subgraph" and len(nodes) < target:
                continue
            if mode == "quota" and profit < target:
                continue
            if mode == "budget" and cost > target:
                continue
            rank = (-profit, cost) if mode == "budget" else (cost, -profit)
            cand = (rank, emb.index, -1 if s is None else s)
            if sample_best is None or cand < sample_best[0]:
                sample_best = (cand, chosen, lifted, profit, sub.cost())
            if best is None or cand < best[0]:
                best = (cand, emb, chosen, lifted, profit, sub.cost(), s)
        samples.append({"index": emb.index, "sigma_max": emb.sigma_max, "cost": None if sample_best is None else graph_cost(sample_best[2])})
    if best is None:
        if mode == "budget":
            report = SolutionReport(mode, True, extra={"profit": Fraction(0), "empty": True, "samples": samples}, **base)
        else:
            report = SolutionReport(mode, False, extra={"samples": samples}, **base)
    else:
        _, emb, chosen, lifted, profit, reduced, s = best
        report = SolutionReport(
            mode,
            True,
            tuple(chosen),
            solution_nodes(lifted),
            tuple(e.key for e in lifted.edges),
            graph_cost(lifted),
            reduced,
            emb.sigma_max,
            extra={"profit": profit, "root": s, "sample_index": emb.index, "samples": samples, "tree_edges": [e.key for e in emb.tree.edges]},
            **base,
        )
    if oracle:
        try:
            value, _ = exact_quota_family(g, mode, target)
        except Infeasible:
            value = None
        if value is not None:
            if mode == "budget":
                report.extra["opt_profit"] = value
            elif report.feasible:
                report = report.with_opt(value)
            else:
                report.exact_opt = value
    report.wall_ms = _elapsed(t0)
    return report


def exact_quota_family(g: Graph, mode: str, target, cap_m: int = QUOTA_CAP_M) -> Tuple[Fraction, Tuple[Key, ...]]:
    """Brute force over edge subsets: min cost (k_subgraph / quota) or max profit (budget)."""
    if g.m > cap_m:
        raise CapExceeded(f"quota-family oracle cap m <= {cap_m}")
    target = Fraction(target)
    if target <= 0:
        return Fraction(0), ()
    edges = list(g.edges)
    best: Optional[Tuple[Tuple, Fraction, Tuple[Key, ...]]] = None
    for mask in range(1, 1 << len(edges)):
        chosen = [edges[i] for i in range(len(edges)) if mask >> i & 1]
        if len(chosen) < 3:
            continue
        cost = sum((e.cost for e in chosen), Fraction(0))
        if mode != "budget" and best is not None and cost >= best[0][0]:
            continue
        if mode == "budget" and cost > target:
            continue
        nodes = {v for e in chosen for v in e.key}
        profit = node_profit(g, nodes)
        if mode == "k_subgraph" and len(nodes) < target:
            continue
        if mode == "quota" and profit < target:
            continue
        rank = (-profit, cost) if mode == "budget" else (cost,)
        if best is not None and rank >= best[0]:
            continue
        if not is_two_connected_edges(e.key for e in chosen):
            continue
        best = (rank, profit if mode == "budget" else cost, tuple(e.key for e in chosen))
    if best is None:
        if mode == "budget":
            return Fraction(0), ()
        raise Infeasible(f"no 2-connected subgraph meets the {mode} target")
    return best[1], best[2]


# ---------------------------------------------------------------------------
# dispatch


def exact_oracle(problem: str, **kw):
    """Uniform entry point for the brute-force oracles (see the ``exact_*`` functions)."""
    if problem == "bta":
        return exact_augmentation(kw["tree"], kw["edges"], "node", "size")
    if problem == "taec":
        return exact_augmentation(kw["tree"], kw["edges"], "edge", "cost")
    if problem == "2cds":
        return exact_2cds(kw["graph"])
    if problem in QUOTA_FAMILY:
        return exact_quota_family(kw["graph"], problem, kw["target"])
    raise BadParams(f"no oracle for {problem!r}")
