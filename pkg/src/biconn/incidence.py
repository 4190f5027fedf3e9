"""Incidence graphs between candidate edges and a tree, and the reachability
criteria they give for 2-edge- and 2-node-connectivity of ``T + F``.

Node keys are plain tuples so they sort deterministically:

* ``("f", u, v)`` -- a candidate edge (link node),
* ``("v", x)``    -- a tree node,
* ``("e", a, b)`` -- a tree edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Dict, FrozenSet, List, Mapping, NamedTuple, Set, Tuple

from .errors import BadParams, EmptyTree, InvalidPair, WrongKind
from .graph_core import EdgeSet, Key, Tree, as_edge_set, connected_components, reachable, st_connectivity_adj, adjacency_from_edges

KINDS = ("FV", "FET", "shortcut_FV", "shortcut_FET", "reduced_FV", "reduced_FET")

Node = Tuple


def link(k: Key) -> Node:
    return ("f", k[0], k[1])


def tree_node(x: int) -> Node:
    return ("v", x)


def tree_edge(k: Key) -> Node:
    return ("e", k[0], k[1])


def is_link(node: Node) -> bool:
    return node[0] == "f"


@dataclass(frozen=True)
class IncidenceGraph:
    kind: str
    adj: Mapping[Node, FrozenSet[Node]]
    terminals: FrozenSet[Node]

    @property
    def nodes(self) -> List[Node]:
        return sorted(self.adj)

    @property
    def links(self) -> List[Node]:
        return [x for x in self.nodes if is_link(x)]

    @property
    def edges(self) -> List[Tuple[Node, Node]]:
        return sorted((a, b) for a in self.adj for b in self.adj[a] if a < b)

    def neighbors(self, node: Node) -> FrozenSet[Node]:
        return self.adj[node]


def _freeze(adj: Dict[Node, Set[Node]]) -> Dict[Node, FrozenSet[Node]]:
    return {k: frozenset(v) for k, v in sorted(adj.items())}


def _raw(tree: Tree, edges: EdgeSet, on_edges: bool) -> IncidenceGraph:
    adj: Dict[Node, Set[Node]] = {}
    if on_edges:
        terms = {tree_edge(e.key) for e in tree.edges}
    else:
        terms = {tree_node(x) for x in tree.nodes}
    for t in terms:
        adj[t] = set()
    for f in edges:
        fn = link(f.key)
        adj[fn] = set()
        if on_edges:
            ends = [tree_edge(k) for k in tree.path(f.u, f.v)]
        else:
            ends = [tree_node(x) for x in tree.path_nodes(f.u, f.v)]
        for t in ends:
            adj[fn].add(t)
            adj[t].add(fn)
    return IncidenceGraph("FET" if on_edges else "FV", _freeze(adj), frozenset(terms))


def short_cut_terminals(h: IncidenceGraph) -> IncidenceGraph:
    """Add a clique on the neighbourhood of every terminal."""
    if h.kind not in ("FV", "FET"):
        raise WrongKind(f"short-cutting applies to FV/FET graphs, not {h.kind}")
    adj = {k: set(v) for k, v in h.adj.items()}
    for t in sorted(h.terminals):
        for a, b in combinations(sorted(h.adj[t]), 2):
            adj[a].add(b)
            adj[b].add(a)
    return IncidenceGraph("shortcut_" + h.kind, _freeze(adj), h.terminals)


def _reduce(tree: Tree, h: IncidenceGraph) -> IncidenceGraph:
    if h.kind == "shortcut_FV":
        keep = {tree_node(x) for x in tree.leaves}
    else:
        keep = {tree_edge(k) for k in tree.leaf_edges}
    drop = h.terminals - keep
    adj = {k: set(v) - drop for k, v in h.adj.items() if k not in drop}
    return IncidenceGraph(h.kind.replace("shortcut_", "reduced_"), _freeze(adj), frozenset(keep))


def build_incidence(tree: Tree, edges, kind: str) -> IncidenceGraph:
    if kind not in KINDS:
        raise BadParams(f"unknown incidence kind {kind!r}")
    if tree.n < 2:
        raise EmptyTree("incidence graphs need a tree with at least one edge")
    es = as_edge_set(tree, edges)
    h = _raw(tree, es, kind.endswith("FET"))
    if kind in ("FV", "FET"):
        return h
    h = short_cut_terminals(h)
    if kind.startswith("shortcut"):
        return h
    return _reduce(tree, h)


def end_edges(tree: Tree, s: int, t: int) -> Tuple[Key, Key]:
    if s == t:
        raise InvalidPair(f"s == t == {s}")
    path = tree.path(s, t)
    return path[0], path[-1]


def h_reachable(tree: Tree, edges, s: int, t: int) -> bool:
    """Whether the end edges of the tree s-t path are joined in the (F, E_T)-incidence graph."""
    es_, et_ = end_edges(tree, s, t)
    if es_ == et_:
        return True
    h = build_incidence(tree, edges, "FET")
    return reachable(h.adj, tree_edge(es_), tree_edge(et_))


def fv_reachable(tree: Tree, edges, s: int, t: int) -> bool:
    """Whether the (F, V)-incidence graph has an s-t path."""
    if s == t:
        raise InvalidPair(f"s == t == {s}")
    h = build_incidence(tree, edges, "FV")
    return reachable(h.adj, tree_node(s), tree_node(t))


def terminals_connected(h: IncidenceGraph) -> bool:
    if not h.kind.startswith("reduced"):
        raise WrongKind(f"terminal connectivity is defined on reduced graphs, not {h.kind}")
    terms = sorted(h.terminals)
    if len(terms) <= 1:
        return True
    for comp in connected_components(h.adj):
        if terms[0] in comp:
            return all(t in comp for t in terms)
    return False


def augmented_connected(tree: Tree, edges, mode: str = "node") -> bool:
    """2-(edge-)connectivity of ``T + F`` decided on the reduced incidence graph."""
    if tree.n < 3:
        raise BadParams("the reduced-graph criteria need a tree with at least 3 nodes")
    kind = "reduced_FET" if mode == "node" else "reduced_FV"
    if mode not in ("node", "edge"):
        raise BadParams(f"unknown mode {mode!r}")
    return terminals_connected(build_incidence(tree, edges, kind))


class EquivResult(NamedTuple):
    agree: bool
    lhs: bool
    rhs: bool


def union_adjacency(tree: Tree, edges) -> Dict[int, Set[int]]:
    es = as_edge_set(tree, edges)
    return adjacency_from_edges([e.key for e in tree.edges] + [f.key for f in es], tree.nodes)


def lemma_equiv_check(tree: Tree, edges, s: int, t: int, mode: str = "node", *, allow_adjacent: bool = False) -> EquivResult:
    """Compare flow connectivity of ``T + F`` between ``s, t`` with the incidence criterion.

    ``edge`` mode uses the (F, V)-graph st-path; ``node`` mode uses H-reachability,
    which is only claimed for pairs that are not adjacent in the tree unless
    ``allow_adjacent`` is set (used to log the degenerate case).
    """
    if s == t:
        raise InvalidPair(f"s == t == {s}")
    es = as_edge_set(tree, edges)
    if mode == "node" and tree.has_edge(s, t) and not allow_adjacent:
        raise InvalidPair(f"{s},{t} adjacent in the tree")
    lhs = st_connectivity_adj(union_adjacency(tree, es), s, t, mode) >= 2
    if mode == "edge":
        rhs = fv_reachable(tree, es, s, t)
    elif mode == "node":
        rhs = h_reachable(tree, es, s, t)
    else:
        raise BadParams(f"unknown mode {mode!r}")
    return EquivResult(lhs == rhs, lhs, rhs)
