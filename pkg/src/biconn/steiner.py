"""Node-weighted Steiner tree, group Steiner and quota/budget subtree routines.

Instances live on a dense-id ``Graph``; ``labels`` maps ids back to whatever
the caller built the instance from (incidence-graph node keys, say).  All
routines are deterministic, breaking ties by the lowest node id.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import BadParams, CapExceeded, Infeasible
from .graph_core import Graph, Key, connected_components, key

DEFAULT_CAP = 20


@dataclass(frozen=True)
class NwstInstance:
    graph: Graph
    terminals: FrozenSet[int]
    weights: Tuple[Fraction, ...]
    labels: Optional[Tuple[Hashable, ...]] = None

    def __post_init__(self):
        if len(self.weights) != self.graph.n:
            raise BadParams("one weight per node required")
        if any(not 0 <= r < self.graph.n for r in self.terminals):
            raise BadParams("terminal outside the graph")
        if any(w < 0 for w in self.weights):
            raise BadParams("negative node weight")
        if any(self.weights[r] for r in self.terminals):
            object.__setattr__(self, "weights", tuple(Fraction(0) if i in self.terminals else w for i, w in enumerate(self.weights)))

    @classmethod
    def from_adjacency(
        cls,
        adj: Mapping[Hashable, Iterable[Hashable]],
        terminals: Iterable[Hashable],
        weight: Callable[[Hashable], object] = lambda node: 1,
    ) -> "NwstInstance":
        labels = tuple(sorted(adj))
        index = {x: i for i, x in enumerate(labels)}
        terms = frozenset(index[t] for t in terminals)
        pairs = {key(index[a], index[b]) for a in adj for b in adj[a]}
        g = Graph.from_edges(len(labels), sorted(pairs))
        weights = tuple(Fraction(0) if i in terms else Fraction(weight(x)) for i, x in enumerate(labels))
        return cls(g, terms, weights, labels)

    @property
    def nonterminals(self) -> List[int]:
        return [v for v in self.graph.nodes if v not in self.terminals]

    def label(self, v: int) -> Hashable:
        return self.labels[v] if self.labels is not None else v

    def weight_of(self, nodes: Iterable[int]) -> Fraction:
        return sum((self.weights[v] for v in nodes), Fraction(0))


@dataclass(frozen=True)
class SteinerSolution:
    nodes: FrozenSet[int]
    edges: Tuple[Key, ...]
    weight: Fraction
    profit: Fraction = Fraction(0)
    order: Tuple[int, ...] = ()

    def labelled(self, inst) -> List[Hashable]:
        return sorted(inst.label(v) for v in self.nodes)


def _spanning_edges(g: Graph, nodes: Set[int]) -> Tuple[Key, ...]:
    if not nodes:
        return ()
    start = min(nodes)
    seen = {start}
    stack = [start]
    out = []
    while stack:
        x = stack.pop()
        for y in sorted(g.adj[x]):
            if y in nodes and y not in seen:
                seen.add(y)
                out.append(key(x, y))
                stack.append(y)
    return tuple(sorted(out))


def _prune(inst: NwstInstance, nodes: Set[int]) -> Set[int]:
    """Drop non-terminal leaves of the induced spanning tree until none remain."""
    nodes = set(nodes)
    while True:
        edges = _spanning_edges(inst.graph, nodes)
        deg = {v: 0 for v in nodes}
        for a, b in edges:
            deg[a] += 1
            deg[b] += 1
        leaves = [v for v in sorted(nodes) if deg[v] <= 1 and v not in inst.terminals and len(nodes) > 1]
        if not leaves:
            return nodes
        nodes.discard(leaves[0])


def _solution(inst: NwstInstance, nodes: Set[int], order=()) -> SteinerSolution:
    nonterminal = [v for v in nodes if v not in inst.terminals]
    return SteinerSolution(frozenset(nodes), _spanning_edges(inst.graph, nodes), inst.weight_of(nonterminal), order=tuple(order))


def _check_terminals_connected(inst: NwstInstance) -> None:
    terms = sorted(inst.terminals)
    if len(terms) <= 1:
        return
    for comp in connected_components(inst.graph.adjacency()):
        if terms[0] in comp:
            if not all(t in comp for t in terms):
                raise Infeasible("terminals lie in different components")
            return


def _dijkstra(inst: NwstInstance, sources: Set[int], cost: Sequence[Fraction]):
    """Node-weighted distances: entering node y costs ``cost[y]``; sources are free."""
    dist: Dict[int, Fraction] = {s: Fraction(0) for s in sources}
    pred: Dict[int, Optional[int]] = {s: None for s in sources}
    heap = [(Fraction(0), s) for s in sorted(sources)]
    done: Set[int] = set()
    while heap:
        d, x = heapq.heappop(heap)
        if x in done:
            continue
        done.add(x)
        for y in sorted(inst.graph.adj[x]):
            nd = d + cost[y]
            if y not in dist or nd < dist[y]:
                dist[y] = nd
                pred[y] = x
                heapq.heappush(heap, (nd, y))
    return dist, pred


def nwst_greedy(inst: NwstInstance) -> SteinerSolution:
    """Spider-merging greedy: repeatedly buy the spider of least cost per merged component."""
    terms = set(inst.terminals)
    if not terms:
        return SteinerSolution(frozenset(), (), Fraction(0))
    _check_terminals_connected(inst)
    g = inst.graph
    selected = set(terms)
    order: List[int] = []

    def components():
        sub = {v: [u for u in g.adj[v] if u in selected] for v in selected}
        return sorted((c for c in connected_components(sub)), key=min)

    comps = components()
    while len(comps) > 1:
        cost = [Fraction(0) if v in selected else inst.weights[v] for v in g.nodes]
        runs = [_dijkstra(inst, c, cost) for c in comps]
        best = None
        for v in g.nodes:
            legs = []
            for i, (dist, _) in enumerate(runs):
                if v in dist:
                    legs.append((dist[v] - cost[v], i))
            legs.sort()
            total = cost[v]
            for j, (d, _) in enumerate(legs, start=1):
                total += d
                if j < 2:
                    continue
                cand = (total / j, v, -j)
                if best is None or cand < best[0]:
                    best = (cand, [i for _, i in legs[:j]])
        (_, center, _), chosen = best
        added = []
        if center not in selected:
            added.append(center)
        for i in chosen:
            _, pred = runs[i]
            x = center
            while pred[x] is not None:
                x = pred[x]
                if x not in selected and x not in added:
                    added.append(x)
        selected.update(added)
        order.extend(added)
        comps = components()
    kept = _prune(inst, selected)
    return _solution(inst, kept, [v for v in order if v in kept])


def _bit_adjacency(g: Graph) -> List[int]:
    masks = []
    for v in g.nodes:
        m = 0
        for u in g.adj[v]:
            m |= 1 << u
        masks.append(m)
    return masks


def _reach(masks: Sequence[int], start: int, allowed: int) -> int:
    reached = 1 << start
    frontier = reached
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= masks[low.bit_length() - 1]
            frontier ^= low
        nxt &= allowed & ~reached
        reached |= nxt
        frontier = nxt
    return reached


def _levels(weights: Sequence[Fraction]):
    """Yield (size, lower bound on the weight of any subset of that size)."""
    ws = sorted(weights)
    acc = Fraction(0)
    yield 0, acc
    for k, w in enumerate(ws, start=1):
        acc += w
        yield k, acc


def nwst_exact_small(inst: NwstInstance, cap: int = DEFAULT_CAP) -> SteinerSolution:
    """Minimum-weight solution by enumerating non-terminal subsets by size."""
    terms = sorted(inst.terminals)
    nts = inst.nonterminals
    if len(nts) > cap:
        raise CapExceeded(f"{len(nts)} non-terminals exceed cap {cap}")
    if not terms:
        return SteinerSolution(frozenset(), (), Fraction(0))
    _check_terminals_connected(inst)
    masks = _bit_adjacency(inst.graph)
    tmask = sum(1 << t for t in terms)
    best: Optional[Tuple[Fraction, Tuple[int, ...]]] = None
    for k, bound in _levels([inst.weights[v] for v in nts]):
        if best is not None and bound >= best[0]:
            break
        for combo in combinations(nts, k):
            w = inst.weight_of(combo)
            if best is not None and w >= best[0]:
                continue
            allowed = tmask | sum(1 << v for v in combo)
            if _reach(masks, terms[0], allowed) & tmask == tmask:
                best = (w, combo)
    nodes = set(terms) | set(best[1])
    return _solution(inst, _prune(inst, nodes))


def nwst_ratio_bound(num_terminals: int) -> float:
    return 2 * math.log(max(num_terminals, 2))


def check_bga_properties(inst: NwstInstance) -> bool:
    """Clique neighbourhoods at terminals and at most two terminal neighbours per non-terminal."""
    g = inst.graph
    for r in inst.terminals:
        nbrs = sorted(g.adj[r])
        for a, b in combinations(nbrs, 2):
            if not g.has_edge(a, b):
                return False
    for v in inst.nonterminals:
        if len(g.adj[v] & inst.terminals) > 2:
            return False
    return True


# ---------------------------------------------------------------------------
# group Steiner


@dataclass(frozen=True)
class GroupSteinerInstance:
    graph: Graph
    groups: Tuple[FrozenSet[int], ...]
    labels: Optional[Tuple[Hashable, ...]] = None

    def __post_init__(self):
        if any(not g for g in self.groups):
            raise BadParams("empty group")

    def label(self, v: int) -> Hashable:
        return self.labels[v] if self.labels is not None else v


def group_steiner_greedy(inst: GroupSteinerInstance, root: int) -> FrozenSet[int]:
    """Grow a tree from ``root``, each time attaching the group reachable by the fewest new nodes."""
    g = inst.graph
    tree = {root}
    while True:
        open_groups = [i for i, grp in enumerate(inst.groups) if not grp & tree]
        if not open_groups:
            return frozenset(tree)
        dist = {v: 0 for v in tree}
        pred: Dict[int, Optional[int]] = {v: None for v in tree}
        frontier = sorted(tree)
        while frontier:
            nxt = []
            for x in frontier:
                for y in sorted(g.adj[x]):
                    if y not in dist:
                        dist[y] = dist[x] + 1
                        pred[y] = x
                        nxt.append(y)
            frontier = sorted(nxt)
        best = None
        for i in open_groups:
            reach = [(dist[v], v) for v in inst.groups[i] if v in dist]
            if not reach:
                raise Infeasible(f"group {i} unreachable from root {root}")
            cand = (min(reach), i)
            if best is None or cand < best:
                best = cand
        (_, target), _ = best
        x = target
        while x is not None and x not in tree:
            tree.add(x)
            x = pred[x]


# ---------------------------------------------------------------------------
# quota / count / budget subtrees

QUOTA_MODES = ("quota", "count", "budget")


@dataclass(frozen=True)
class QuotaSubtreeInstance:
    """Connected subtrees of ``nwst.graph``; terminals are free and carry ``profits``.

    ``target`` is the profit quota (``quota``), the terminal count (``count``,
    every terminal then has profit 1) or the weight budget (``budget``).  When
    ``anchors`` is set every solution must contain at least one anchor node.
    """

    nwst: NwstInstance
    profits: Tuple[Fraction, ...]
    mode: str
    target: Fraction
    anchors: Optional[FrozenSet[int]] = None

    def __post_init__(self):
        if self.mode not in QUOTA_MODES:
            raise BadParams(f"unknown mode {self.mode!r}")
        if self.target < 0:
            raise BadParams("target must be nonnegative")
        if len(self.profits) != self.nwst.graph.n:
            raise BadParams("one profit per node required")

    @classmethod
    def build(cls, nwst: NwstInstance, mode: str, target, profits: Optional[Mapping[int, object]] = None, anchors: Optional[Iterable[int]] = None):
        if mode == "count":
            prof = tuple(Fraction(1) if v in nwst.terminals else Fraction(0) for v in nwst.graph.nodes)
        else:
            profits = profits or {}
            prof = tuple(Fraction(profits.get(v, 0)) if v in nwst.terminals else Fraction(0) for v in nwst.graph.nodes)
        return cls(nwst, prof, mode, Fraction(target), None if anchors is None else frozenset(anchors))


def _closure(g: Graph, terms: FrozenSet[int], nodes: Set[int], grow: Sequence[int] = ()) -> Tuple[Set[int], List[int]]:
    """``nodes`` plus every terminal reachable from ``grow`` through terminals
    only, and the newly added nodes in BFS order (so each joins a connected set)."""
    out = set(nodes) | set(grow)
    added = list(grow)
    queue = deque(grow)
    while queue:
        x = queue.popleft()
        for y in sorted(g.adj[x]):
            if y in terms and y not in out:
                out.add(y)
                added.append(y)
                queue.append(y)
    return out, added


def _meets(inst: QuotaSubtreeInstance, profit: Fraction, weight: Fraction) -> bool:
    if inst.mode == "budget":
        return weight <= inst.target
    return profit >= inst.target


def _rank(inst: QuotaSubtreeInstance, profit: Fraction, weight: Fraction):
    return (-profit, weight) if inst.mode == "budget" else (weight, -profit)


def _quota_solution(inst: QuotaSubtreeInstance, nodes: Set[int], order=()) -> SteinerSolution:
    nw = inst.nwst
    weight = nw.weight_of(v for v in nodes if v not in nw.terminals)
    profit = sum((inst.profits[v] for v in nodes), Fraction(0))
    return SteinerSolution(frozenset(nodes), _spanning_edges(nw.graph, nodes), weight, profit, tuple(order))


def _quota_greedy(inst: QuotaSubtreeInstance) -> Optional[SteinerSolution]:
    nw = inst.nwst
    g = nw.graph
    terms = nw.terminals

    def profit_of(nodes):
        return sum((inst.profits[v] for v in nodes), Fraction(0))

    starts = sorted(inst.anchors) if inst.anchors is not None else list(g.nodes)
    best = None
    best_key = None
    for start in starts:
        current, order = _closure(g, terms, set(), [start])
        weight = nw.weights[start]
        if inst.mode == "budget" and weight > inst.target:
            continue
        profit = profit_of(current)
        while inst.mode == "budget" or profit < inst.target:
            scored = []
            for y in sorted({y for x in current for y in g.adj[x]} - current):
                w = nw.weights[y]
                if inst.mode == "budget" and weight + w > inst.target:
                    continue
                gain = profit_of(_closure(g, terms, current, [y])[0]) - profit
                if inst.mode == "budget" and gain == 0 and w > 0:
                    continue
                ratio = gain / w if w > 0 else (math.inf if gain > 0 else 0)
                scored.append(((gain > 0, ratio, -w), -y))
            if not scored:
                break
            y = -max(scored)[1]
            current, added = _closure(g, terms, current, [y])
            order.extend(added)
            weight += nw.weights[y]
            profit = profit_of(current)
        if not _meets(inst, profit, weight):
            continue
        rank = _rank(inst, profit, weight)
        if best_key is None or rank < best_key:
            best_key = rank
            best = _quota_solution(inst, current, order)
    return best


def _quota_exact(inst: QuotaSubtreeInstance, cap: int) -> Optional[SteinerSolution]:
    nw = inst.nwst
    nts = nw.nonterminals
    if len(nts) > cap:
        raise CapExceeded(f"{len(nts)} non-terminals exceed cap {cap}")
    masks = _bit_adjacency(nw.graph)
    tmask = sum(1 << t for t in nw.terminals)
    amask = sum(1 << a for a in inst.anchors) if inst.anchors is not None else -1
    best = None
    best_key = None
    for k, bound in _levels([nw.weights[v] for v in nts]):
        if inst.mode == "budget":
            if bound > inst.target:
                break
        elif best_key is not None and bound >= best_key[0]:
            break
        for combo in combinations(nts, k):
            w = nw.weight_of(combo)
            if inst.mode == "budget" and w > inst.target:
                continue
            if inst.mode != "budget" and best_key is not None and w >= best_key[0]:
                continue
            cmask = sum(1 << v for v in combo)
            allowed = tmask | cmask
            if combo:
                seeds = [combo[0]]
            else:
                seeds = sorted(nw.terminals if inst.anchors is None else nw.terminals & inst.anchors)
            for s in seeds:
                reached = _reach(masks, s, allowed)
                if reached & cmask != cmask or not reached & amask:
                    continue
                nodes = {v for v in nw.graph.nodes if reached >> v & 1}
                profit = sum((inst.profits[v] for v in nodes), Fraction(0))
                if not _meets(inst, profit, w):
                    continue
                rank = _rank(inst, profit, w)
                if best_key is None or rank < best_key:
                    best_key = rank
                    best = _quota_solution(inst, nodes, [s] + [v for v in combo if v != s])
    return best


def quota_subtree(inst: QuotaSubtreeInstance, *, exact: Optional[bool] = None, cap: int = DEFAULT_CAP) -> SteinerSolution:
    """Cheapest subtree meeting a profit/count target, or most profitable one within a budget.

    ``exact=None`` enumerates exactly for quota/count modes when the instance is
    within ``cap`` non-terminals and otherwise grows greedily from every start
    node, keeping the best.  Budget mode is greedy unless ``exact=True``.
    ``order`` of a greedy result lists nodes in insertion order, so every
    prefix of it is connected.
    """
    if inst.mode != "budget" and inst.target <= 0:
        return SteinerSolution(frozenset(), (), Fraction(0))
    if exact is None:
        exact = inst.mode != "budget" and len(inst.nwst.nonterminals) <= cap
    sol = _quota_exact(inst, cap) if exact else _quota_greedy(inst)
    if sol is None:
        if inst.mode == "budget":
            return SteinerSolution(frozenset(), (), Fraction(0))
        raise Infeasible(f"no subtree reaches {inst.mode} target {inst.target}")
    return sol
