"""Spanning-tree samplers and measured stretch.

A sampled tree stands in for a low-stretch embedding: every downstream cost
bound only needs the per-tree stretch ``c(T_f) / c(f)``, which is measured
exactly here.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from .errors import BadParams, NotConnected, NotSpanning
from .graph_core import Graph, Tree, is_connected

METHODS = ("random_walk_tree", "perturbed_mst", "bfs_random_root")


@dataclass(frozen=True)
class SamplerConfig:
    method: str = "random_walk_tree"
    samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise BadParams(f"unknown sampler {self.method!r}")
        if self.samples < 1:
            raise BadParams("samples must be >= 1")

    def as_dict(self) -> dict:
        return {"method": self.method, "samples": self.samples, "seed": self.seed}


@dataclass(frozen=True)
class TreeEmbedding:
    base: Graph
    tree: Tree
    per_edge_stretch: Tuple[Fraction, ...]  # indexed by edge id of ``base``
    sigma_max: Fraction
    sigma_avg: Fraction
    seed: int = 0
    method: str = "given"
    index: int = 0


def _rng(config: SamplerConfig, index: int) -> random.Random:
    # string seeds are hashed with sha512, so the per-index streams are independent
    return random.Random(f"{config.method}/{config.seed}/{index}")


def _wilson(g: Graph, rng: random.Random):
    root = rng.randrange(g.n)
    in_tree = [False] * g.n
    in_tree[root] = True
    nxt = [-1] * g.n
    nbrs = [sorted(a) for a in g.adj]
    edges = []
    for start in range(g.n):
        u = start
        while not in_tree[u]:
            nxt[u] = rng.choice(nbrs[u])
            u = nxt[u]
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            edges.append(g.edge(u, nxt[u]))
            u = nxt[u]
    return edges


def _perturbed_mst(g: Graph, rng: random.Random):
    factors = [1 + rng.random() for _ in g.edges]
    order = sorted(range(g.m), key=lambda i: (float(g.edges[i].cost) * factors[i], i))
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for i in order:
        e = g.edges[i]
        a, b = find(e.u), find(e.v)
        if a != b:
            parent[a] = b
            edges.append(e)
    return edges


def _bfs(g: Graph, rng: random.Random):
    root = rng.randrange(g.n)
    seen = {root}
    queue = deque([root])
    edges = []
    while queue:
        x = queue.popleft()
        for y in sorted(g.adj[x]):
            if y not in seen:
                seen.add(y)
                edges.append(g.edge(x, y))
                queue.append(y)
    return edges


def sample_spanning_tree(g: Graph, config: SamplerConfig, index: int = 0) -> Tree:
    """Spanning tree number ``index`` of the stream defined by ``config``."""
    if not is_connected(g):
        raise NotConnected("cannot span a disconnected graph")
    rng = _rng(config, index)
    if config.method == "random_walk_tree":
        edges = _wilson(g, rng)
    elif config.method == "perturbed_mst":
        edges = _perturbed_mst(g, rng)
    else:
        edges = _bfs(g, rng)
    return Tree(g.n, tuple(sorted(edges, key=lambda e: e.key)), g.node_profits)


def measure_stretch(g: Graph, tree: Tree, *, seed: int = 0, method: str = "given", index: int = 0) -> TreeEmbedding:
    if tree.n != g.n or any(not g.has_edge(*e.key) for e in tree.edges):
        raise NotSpanning("tree is not a spanning tree of the graph")
    stretch = []
    for e in g.edges:
        if tree.has_edge(*e.key):
            stretch.append(Fraction(1))
            continue
        path_cost = sum((g.cost(*k) for k in tree.path(e.u, e.v)), Fraction(0))
        if e.cost == 0:
            if path_cost:
                raise BadParams(f"stretch undefined for zero-cost edge {e.key}")
            stretch.append(Fraction(1))
        else:
            stretch.append(path_cost / e.cost)
    sigma_max = max(stretch, default=Fraction(1))
    sigma_avg = sum(stretch, Fraction(0)) / len(stretch) if stretch else Fraction(1)
    return TreeEmbedding(g, tree, tuple(stretch), sigma_max, sigma_avg, seed, method, index)


def embeddings(g: Graph, config: SamplerConfig):
    for i in range(config.samples):
        tree = sample_spanning_tree(g, config, i)
        yield measure_stretch(g, tree, seed=config.seed, method=config.method, index=i)


def best_embedding(g: Graph, config: SamplerConfig) -> TreeEmbedding:
    """Lowest ``sigma_max`` over ``config.samples`` draws; ties go to the lower index."""
    best = None
    for emb in embeddings(g, config):
        if best is None or emb.sigma_max < best.sigma_max:
            best = emb
    return best
