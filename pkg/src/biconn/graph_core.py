"""Graphs, trees, connectivity checks and instance generators.

Everything here is immutable after construction.  Node ids are dense
integers ``0..n-1``; undirected edges are stored canonically with ``u < v``
and their position in ``Graph.edges`` is the edge id.  Costs are exact
``Fraction`` values so cost comparisons never depend on float rounding.
"""

from __future__ import annotations

import random
import warnings
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple, Union

from .errors import BadParams, DegeneratePath, FilteredInput, InvalidNode, InvalidPair, NotATree, NotConnected

Key = Tuple[int, int]
CostLike = Union[int, str, Fraction, float]


def as_cost(value: CostLike) -> Fraction:
    if isinstance(value, float):
        # str() keeps the shortest decimal repr, e.g. 0.1 -> 1/10
        value = str(value)
    cost = Fraction(value)
    if cost < 0:
        raise BadParams(f"negative cost {value!r}")
    return cost


def key(u: int, v: int) -> Key:
    return (u, v) if u < v else (v, u)


class Edge(NamedTuple):
    u: int
    v: int
    cost: Fraction = Fraction(1)

    @property
    def key(self) -> Key:
        return (self.u, self.v)


@dataclass(frozen=True)
class Graph:
    n: int
    edges: Tuple[Edge, ...] = ()
    node_profits: Optional[Tuple[Fraction, ...]] = None

    def __post_init__(self):
        if self.n < 0:
            raise BadParams("negative node count")
        seen: Set[Key] = set()
        for e in self.edges:
            if e.u == e.v:
                raise BadParams(f"self-loop at {e.u}")
            if not (0 <= e.u < e.v < self.n):
                raise InvalidNode(f"edge {e.u}-{e.v} not canonical or out of range for n={self.n}")
            if e.key in seen:
                raise BadParams(f"parallel edge {e.u}-{e.v}")
            if e.cost < 0:
                raise BadParams(f"negative cost on {e.u}-{e.v}")
            seen.add(e.key)
        if self.node_profits is not None and len(self.node_profits) != self.n:
            raise BadParams("node_profits must list one profit per node")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Union[Tuple[int, int], Tuple[int, int, CostLike], Edge]],
        profits: Optional[Union[Sequence[CostLike], Mapping[int, CostLike]]] = None,
    ) -> "Graph":
        out = []
        for item in edges:
            if len(item) == 2:
                u, v = item
                c: CostLike = 1
            else:
                u, v, c = item
            u, v = int(u), int(v)
            if u == v:
                raise BadParams(f"self-loop at {u}")
            a, b = key(u, v)
            out.append(Edge(a, b, as_cost(c)))
        prof = None
        if profits is not None:
            if isinstance(profits, Mapping):
                prof = tuple(as_cost(profits.get(v, 0)) for v in range(n))
            else:
                prof = tuple(as_cost(p) for p in profits)
        return cls(n, tuple(out), prof)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def nodes(self) -> range:
        return range(self.n)

    @cached_property
    def adj(self) -> Tuple[FrozenSet[int], ...]:
        nbrs: List[Set[int]] = [set() for _ in range(self.n)]
        for e in self.edges:
            nbrs[e.u].add(e.v)
            nbrs[e.v].add(e.u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def edge_index(self) -> Dict[Key, int]:
        return {e.key: i for i, e in enumerate(self.edges)}

    def has_edge(self, u: int, v: int) -> bool:
        return key(u, v) in self.edge_index

    def edge(self, u: int, v: int) -> Edge:
        return self.edges[self.edge_index[key(u, v)]]

    def cost(self, u: int, v: int) -> Fraction:
        return self.edge(u, v).cost

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def profit(self, v: int) -> Fraction:
        if self.node_profits is None:
            return Fraction(1)
        return self.node_profits[v]

    def adjacency(self) -> Dict[int, FrozenSet[int]]:
        return dict(enumerate(self.adj))

    def _check_node(self, v: int) -> None:
        if not (isinstance(v, int) and 0 <= v < self.n):
            raise InvalidNode(f"node {v!r} not in graph of {self.n} nodes")


@dataclass(frozen=True)
class Tree(Graph):
    """A spanning tree on ``0..n-1``; validated on construction."""

    def __post_init__(self):
        super().__post_init__()
        if self.n == 0:
            raise NotATree("tree needs at least one node")
        if self.m != self.n - 1:
            raise NotATree(f"{self.m} edges on {self.n} nodes")
        if len(_components(self.adjacency())) != 1:
            raise NotATree("not connected")

    @classmethod
    def from_graph(cls, g: Graph) -> "Tree":
        return cls(g.n, g.edges, g.node_profits)

    def parents(self, root: int = 0) -> Tuple[int, ...]:
        return self._rooting(root)[0]

    def depths(self, root: int = 0) -> Tuple[int, ...]:
        return self._rooting(root)[1]

    def _rooting(self, root: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        cache = self.__dict__.setdefault("_root_cache", {})
        if root not in cache:
            self._check_node(root)
            parent = [-1] * self.n
            depth = [0] * self.n
            seen = [False] * self.n
            seen[root] = True
            queue = deque([root])
            while queue:
                x = queue.popleft()
                for y in sorted(self.adj[x]):
                    if not seen[y]:
                        seen[y] = True
                        parent[y] = x
                        depth[y] = depth[x] + 1
                        queue.append(y)
            cache[root] = (tuple(parent), tuple(depth))
        return cache[root]

    @cached_property
    def leaves(self) -> Tuple[int, ...]:
        return tuple(v for v in self.nodes if self.degree(v) == 1)

    @cached_property
    def leaf_edges(self) -> Tuple[Key, ...]:
        return tuple(e.key for e in self.edges if self.degree(e.u) == 1 or self.degree(e.v) == 1)

    def path_nodes(self, u: int, v: int) -> List[int]:
        self._check_node(u)
        self._check_node(v)
        parent, depth = self._rooting(0)
        left, right = [u], [v]
        a, b = u, v
        while depth[a] > depth[b]:
            a = parent[a]
            left.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            right.append(b)
        while a != b:
            a, b = parent[a], parent[b]
            left.append(a)
            right.append(b)
        right.pop()
        return left + right[::-1]

    def path(self, u: int, v: int) -> List[Key]:
        nodes = self.path_nodes(u, v)
        return [key(a, b) for a, b in zip(nodes, nodes[1:])]


@dataclass(frozen=True)
class EdgeSet:
    """Candidate edges for augmenting ``tree``; never contains a tree edge."""

    tree: Tree
    edges: Tuple[Edge, ...]

    @classmethod
    def for_tree(cls, tree: Tree, edges: Iterable[Union[Tuple[int, int], Tuple[int, int, CostLike], Edge]]) -> "EdgeSet":
        out: Dict[Key, Edge] = {}
        dropped = []
        for item in edges:
            if len(item) == 2:
                u, v = item
                c: CostLike = 1
            else:
                u, v, c = item
            tree._check_node(u)
            tree._check_node(v)
            if u == v:
                raise BadParams(f"self-loop at {u}")
            k = key(u, v)
            if tree.has_edge(*k):
                dropped.append(k)
                continue
            if k not in out:
                out[k] = Edge(k[0], k[1], as_cost(c))
        if dropped:
            warnings.warn(f"dropped candidate edges duplicating tree edges: {dropped}", FilteredInput, stacklevel=2)
        return cls(tree, tuple(sorted(out.values(), key=lambda e: e.key)))

    def __iter__(self):
        return iter(self.edges)

    def __len__(self):
        return len(self.edges)

    @property
    def keys(self) -> Tuple[Key, ...]:
        return tuple(e.key for e in self.edges)

    def subset(self, keys: Iterable[Key]) -> "EdgeSet":
        wanted = set(keys)
        return EdgeSet(self.tree, tuple(e for e in self.edges if e.key in wanted))

    def cost(self) -> Fraction:
        return sum((e.cost for e in self.edges), Fraction(0))


def as_edge_set(tree: Tree, edges) -> EdgeSet:
    if isinstance(edges, EdgeSet):
        return edges
    return EdgeSet.for_tree(tree, edges)


# ---------------------------------------------------------------------------
# tree paths


def tree_path(tree: Tree, u: int, v: int) -> List[Key]:
    """Edges of the unique ``u``-``v`` path, ordered from ``u``."""
    tree._check_node(u)
    tree._check_node(v)
    if u == v:
        raise DegeneratePath(f"path from {u} to itself")
    return tree.path(u, v)


def covered_forest(tree: Tree, edges) -> Graph:
    """Subgraph of ``tree`` made of the edges lying on some candidate's tree path."""
    es = as_edge_set(tree, edges)
    covered: Set[Key] = set()
    for f in es:
        covered.update(tree.path(f.u, f.v))
    return Graph(tree.n, tuple(e for e in tree.edges if e.key in covered))


# ---------------------------------------------------------------------------
# generic adjacency helpers (nodes may be any hashable)

Adjacency = Mapping[Hashable, Iterable[Hashable]]


def adjacency_from_edges(edges: Iterable[Tuple[Hashable, Hashable]], nodes: Iterable[Hashable] = ()) -> Dict[Hashable, Set[Hashable]]:
    adj: Dict[Hashable, Set[Hashable]] = {v: set() for v in nodes}
    for u, v in edges:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    return adj


def _components(adj: Adjacency) -> List[Set[Hashable]]:
    seen: Set[Hashable] = set()
    comps = []
    for start in adj:
        if start in seen:
            continue
        comp = {start}
        seen.add(start)
        stack = [start]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    comp.add(y)
                    stack.append(y)
        comps.append(comp)
    return comps


def connected_components(adj: Adjacency) -> List[Set[Hashable]]:
    return _components(adj)


def reachable(adj: Adjacency, source: Hashable, target: Hashable) -> bool:
    if source == target:
        return True
    seen = {source}
    stack = [source]
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y == target:
                return True
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def _dfs_lowpoint(adj: Adjacency):
    """Iterative Hopcroft-Tarjan: articulation points, bridges and blocks."""
    disc: Dict[Hashable, int] = {}
    low: Dict[Hashable, int] = {}
    cut: Set[Hashable] = set()
    bridges: List[Tuple[Hashable, Hashable]] = []
    blocks: List[Set[Hashable]] = []
    counter = 0
    for root in adj:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        if not adj[root]:
            blocks.append({root})
            continue
        root_children = 0
        edge_stack: List[Tuple[Hashable, Hashable]] = []
        stack = [(root, None, iter(sorted(adj[root], key=repr)))]
        while stack:
            x, parent, it = stack[-1]
            advanced = False
            for y in it:
                if y == parent:
                    continue
                if y not in disc:
                    disc[y] = low[y] = counter
                    counter += 1
                    edge_stack.append((x, y))
                    stack.append((y, x, iter(sorted(adj[y], key=repr))))
                    if x == root:
                        root_children += 1
                    advanced = True
                    break
                if disc[y] < disc[x]:
                    low[x] = min(low[x], disc[y])
                    edge_stack.append((x, y))
            if advanced:
                continue
            stack.pop()
            if parent is None:
                continue
            low[parent] = min(low[parent], low[x])
            if low[x] > disc[parent]:
                bridges.append((parent, x))
            if low[x] >= disc[parent]:
                if parent != root:
                    cut.add(parent)
                block: Set[Hashable] = set()
                while True:
                    a, b = edge_stack.pop()
                    block.update((a, b))
                    if (a, b) == (parent, x):
                        break
                blocks.append(block)
        if root_children > 1:
            cut.add(root)
    return cut, bridges, blocks


def articulation_points(adj: Adjacency) -> Set[Hashable]:
    return _dfs_lowpoint(adj)[0]


def bridges(adj: Adjacency) -> List[Tuple[Hashable, Hashable]]:
    return _dfs_lowpoint(adj)[1]


def is_two_connected_adj(adj: Adjacency, mode: str = "node") -> bool:
    if mode not in ("node", "edge"):
        raise BadParams(f"unknown mode {mode!r}")
    n = len(adj)
    if n < (3 if mode == "node" else 2):
        return False
    if len(_components(adj)) != 1:
        return False
    cut, brs, _ = _dfs_lowpoint(adj)
    return not cut if mode == "node" else not brs


def is_two_connected_edges(edges: Iterable[Tuple[Hashable, Hashable]], mode: str = "node") -> bool:
    """2-(edge-)connectivity of the graph spanned by ``edges`` (its node set is their endpoints)."""
    return is_two_connected_adj(adjacency_from_edges(edges), mode)


# ---------------------------------------------------------------------------
# flows


def _max_flow(arcs: Dict[Tuple[Hashable, Hashable], int], source: Hashable, sink: Hashable) -> int:
    residual: Dict[Hashable, Dict[Hashable, int]] = {}
    for (a, b), c in arcs.items():
        residual.setdefault(a, {})
        residual.setdefault(b, {})
        residual[a][b] = residual[a].get(b, 0) + c
        residual[b].setdefault(a, 0)
    flow = 0
    while True:
        pred = {source: None}
        queue = deque([source])
        while queue and sink not in pred:
            x = queue.popleft()
            for y, c in residual[x].items():
                if c > 0 and y not in pred:
                    pred[y] = x
                    queue.append(y)
        if sink not in pred:
            return flow
        y = sink
        while pred[y] is not None:
            x = pred[y]
            residual[x][y] -= 1
            residual[y][x] += 1
            y = x
        flow += 1


def st_connectivity_adj(adj: Adjacency, s: Hashable, t: Hashable, mode: str = "node") -> int:
    if s == t:
        raise InvalidPair(f"s == t == {s!r}")
    big = len(adj) + 1
    arcs: Dict[Tuple[Hashable, Hashable], int] = {}
    if mode == "edge":
        for x, nbrs in adj.items():
            for y in nbrs:
                arcs[(x, y)] = 1
        return _max_flow(arcs, s, t)
    if mode != "node":
        raise BadParams(f"unknown mode {mode!r}")
    for x in adj:
        arcs[((x, 0), (x, 1))] = big if x in (s, t) else 1
    for x, nbrs in adj.items():
        for y in nbrs:
            arcs[((x, 1), (y, 0))] = 1
    return _max_flow(arcs, (s, 1), (t, 0))


def st_connectivity(g: Graph, s: int, t: int, mode: str = "node") -> int:
    """Max number of edge-disjoint (``edge``) or internally disjoint (``node``) s-t paths."""
    g._check_node(s)
    g._check_node(t)
    return st_connectivity_adj(g.adjacency(), s, t, mode)


def is_k_connected(g: Graph, mode: str = "node", k: int = 2) -> bool:
    if k != 2:
        raise BadParams("only k=2 is supported")
    return is_two_connected_adj(g.adjacency(), mode)


def is_connected(g: Graph) -> bool:
    return g.n > 0 and len(_components(g.adjacency())) == 1


# ---------------------------------------------------------------------------
# block-cut tree


@dataclass(frozen=True)
class BlockCutTree:
    tree: Tree
    blocks: Tuple[FrozenSet[int], ...]
    cut_vertices: Tuple[int, ...]

    def block_node(self, i: int) -> int:
        return i

    def cut_node(self, v: int) -> int:
        return len(self.blocks) + self.cut_vertices.index(v)


def block_cut_tree(g: Graph) -> BlockCutTree:
    """Blocks are tree nodes ``0..b-1``; cut vertices follow in increasing id order."""
    if not is_connected(g):
        raise NotConnected("block-cut tree needs a connected graph")
    cut, _, blocks = _dfs_lowpoint(g.adjacency())
    blocks_sorted = tuple(sorted((frozenset(b) for b in blocks), key=lambda b: sorted(b)))
    cuts = tuple(sorted(cut))
    nb = len(blocks_sorted)
    edges = []
    for i, b in enumerate(blocks_sorted):
        for j, c in enumerate(cuts):
            if c in b:
                edges.append((i, nb + j))
    tree = Tree.from_graph(Graph.from_edges(nb + len(cuts), edges))
    return BlockCutTree(tree, blocks_sorted, cuts)


def dominates(g: Graph, nodes: Iterable[int]) -> bool:
    chosen = set(nodes)
    for v in chosen:
        g._check_node(v)
    return all(v in chosen or g.adj[v] & chosen for v in g.nodes)


# ---------------------------------------------------------------------------
# generators


def _prufer_tree(n: int, rng: random.Random) -> List[Key]:
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = next(v for v in range(n) if degree[v] == 1)
        edges.append(key(leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [v for v in range(n) if degree[v] == 1]
    edges.append(key(u, v))
    return edges


def _cactus_edges(n: int, rng: random.Random, max_cycle: int) -> List[Key]:
    edges: List[Key] = []
    remaining = n - 1
    next_id = 1
    # each new cycle adds ``part`` >= 2 fresh nodes; never leave exactly one node over
    while remaining > 0:
        if remaining <= max_cycle - 1 and (remaining <= 3 or rng.random() < 0.3):
            part = remaining
        else:
            part = rng.randint(2, max(2, min(remaining - 2, max_cycle - 1)))
        anchor = rng.randrange(next_id)
        cycle = [anchor] + list(range(next_id, next_id + part))
        next_id += part
        remaining -= part
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            edges.append(key(a, b))
    return edges


GENERATOR_KINDS = ("random_tree", "gnp", "cycle", "grid", "random_cactus", "complete")


def generate(kind: str, params: Optional[Mapping] = None, seed: int = 0) -> Graph:
    """Deterministic instance generator; output depends only on ``(kind, params, seed)``.

    kinds: ``random_tree(n)``, ``gnp(n, p, connected=False)``, ``cycle(n)``,
    ``grid(rows, cols)``, ``random_cactus(n, max_cycle=6)``, ``complete(n)``.
    Optional ``costs=(lo, hi)`` draws integer edge costs uniformly.
    """
    params = dict(params or {})
    rng = random.Random(f"{kind}/{seed}")
    n = params.get("n")
    if kind != "grid":
        if not isinstance(n, int) or n < 1:
            raise BadParams(f"{kind} needs integer n >= 1")
    if kind == "random_tree":
        pairs = _prufer_tree(n, rng)
    elif kind == "gnp":
        p = params.get("p", 0.5)
        if not 0 <= p <= 1:
            raise BadParams("p must lie in [0, 1]")
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
        if params.get("connected", False):
            pairs = sorted(set(pairs) | set(_prufer_tree(n, rng)))
    elif kind == "cycle":
        if n < 3:
            raise BadParams("cycle needs n >= 3")
        pairs = [key(i, (i + 1) % n) for i in range(n)]
    elif kind == "grid":
        rows, cols = params.get("rows"), params.get("cols")
        if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 1 and cols >= 1):
            raise BadParams("grid needs rows, cols >= 1")
        n = rows * cols
        pairs = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    pairs.append((v, v + 1))
                if r + 1 < rows:
                    pairs.append((v, v + cols))
    elif kind == "random_cactus":
        if n < 3:
            raise BadParams("cactus needs n >= 3")
        max_cycle = params.get("max_cycle", 6)
        if max_cycle < 3 or (max_cycle == 3 and n % 2 == 0):
            raise BadParams("max_cycle must be >= 3 (and n odd when only triangles are allowed)")
        pairs = _cactus_edges(n, rng, max_cycle)
    elif kind == "complete":
        pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    else:
        raise BadParams(f"unknown generator {kind!r}")
    costs = params.get("costs")
    if costs is not None:
        lo, hi = costs
        if not (1 <= lo <= hi):
            raise BadParams("costs range must satisfy 1 <= lo <= hi")
        triples = [(u, v, rng.randint(lo, hi)) for u, v in pairs]
    else:
        triples = [(u, v, 1) for u, v in pairs]
    profits = None
    if params.get("profits") is not None:
        lo, hi = params["profits"]
        profits = [rng.randint(lo, hi) for _ in range(n)]
    return Graph.from_edges(n, sorted(triples), profits)


def random_candidates(tree: Tree, count: int, rng: random.Random) -> EdgeSet:
    """Up to ``count`` distinct non-tree edges drawn uniformly."""
    pool = [(u, v) for u in range(tree.n) for v in range(u + 1, tree.n) if not tree.has_edge(u, v)]
    rng.shuffle(pool)
    return EdgeSet.for_tree(tree, sorted(pool[:count]))


def union_graph(tree: Tree, edges: Iterable[Edge]) -> Graph:
    return Graph(tree.n, tuple(sorted(tuple(tree.edges) + tuple(edges), key=lambda e: e.key)), tree.node_profits)
