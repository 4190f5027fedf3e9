import warnings
from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biconn.errors import BadParams, DegeneratePath, FilteredInput, InvalidNode, InvalidPair, NotATree, NotConnected
from biconn.graph_core import (
    EdgeSet,
    Graph,
    Tree,
    articulation_points,
    as_cost,
    block_cut_tree,
    bridges,
    covered_forest,
    dominates,
    generate,
    is_connected,
    is_k_connected,
    st_connectivity,
    tree_path,
)

from strategies import connected_graphs, trees


def path(n):
    return Tree.from_graph(Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)]))


def star(leaves=3):
    # centre is the last node
    c = leaves
    return Tree.from_graph(Graph.from_edges(leaves + 1, [(i, c) for i in range(leaves)]))


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(g.nodes)
    h.add_edges_from(e.key for e in g.edges)
    return h


TWO_TRIANGLES = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])


# --- construction --------------------------------------------------------


def test_graph_rejects_self_loop_and_parallel_edges():
    with pytest.raises(BadParams):
        Graph.from_edges(3, [(1, 1)])
    with pytest.raises(BadParams):
        Graph.from_edges(3, [(0, 1), (1, 0)])


def test_edges_are_canonical_and_costs_exact():
    g = Graph.from_edges(3, [(2, 0, "3/2"), (1, 0, 0.5)])
    # ids follow input order, endpoints are stored u < v
    assert [e.key for e in g.edges] == [(0, 2), (0, 1)]
    assert g.edge_index[(0, 1)] == 1
    assert g.cost(2, 0) == Fraction(3, 2)
    assert g.cost(0, 1) == Fraction(1, 2)


def test_negative_cost_rejected():
    with pytest.raises(BadParams):
        as_cost(-1)


def test_tree_validation():
    with pytest.raises(NotATree):
        Tree.from_graph(Graph.from_edges(3, [(0, 1)]))
    with pytest.raises(NotATree):
        Tree.from_graph(Graph.from_edges(4, [(0, 1), (1, 2), (0, 2)]))


def test_default_profit_is_one():
    g = Graph.from_edges(2, [(0, 1)])
    assert g.profit(0) == 1
    assert Graph.from_edges(2, [(0, 1)], [3, 4]).profit(1) == 4


# --- tree paths ----------------------------------------------------------


def test_tree_path_on_path_graph():
    assert tree_path(path(3), 0, 2) == [(0, 1), (1, 2)]


def test_tree_path_through_star_centre():
    assert tree_path(star(2), 0, 1) == [(0, 2), (1, 2)]


def test_tree_path_degenerate_and_invalid():
    with pytest.raises(DegeneratePath):
        tree_path(path(3), 0, 0)
    with pytest.raises(InvalidNode):
        tree_path(path(3), 0, 7)


@given(trees(2, 10), st.data())
def test_tree_path_reverses(tree, data):
    u, v = data.draw(st.sampled_from(list(combinations(tree.nodes, 2))))
    assert tree_path(tree, u, v) == tree_path(tree, v, u)[::-1]
    nodes = nx.shortest_path(to_nx(tree), u, v)
    assert tree_path(tree, u, v) == [tuple(sorted(p)) for p in zip(nodes, nodes[1:])]


# --- covered forest ------------------------------------------------------


def test_covered_forest_long_link():
    assert [e.key for e in covered_forest(path(4), [(0, 3)]).edges] == [(0, 1), (1, 2), (2, 3)]


def test_covered_forest_empty():
    assert covered_forest(path(4), []).m == 0


def test_duplicate_of_tree_edge_is_filtered_with_warning():
    with pytest.warns(FilteredInput):
        es = EdgeSet.for_tree(path(4), [(0, 1)])
    assert len(es) == 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", FilteredInput)
        assert covered_forest(path(4), EdgeSet.for_tree(path(4), [(0, 1)])).m == 0


# --- connectivity --------------------------------------------------------


def test_st_connectivity_examples():
    c4 = generate("cycle", {"n": 4})
    assert st_connectivity(c4, 0, 2, "node") == 2
    p = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert st_connectivity(p, 0, 3, "node") == 1
    assert st_connectivity(p, 0, 3, "edge") == 1
    k4 = generate("complete", {"n": 4})
    assert all(st_connectivity(k4, s, t, "node") == 3 for s, t in combinations(range(4), 2))


def test_st_connectivity_same_node():
    with pytest.raises(InvalidPair):
        st_connectivity(generate("cycle", {"n": 4}), 1, 1)


def test_two_connectivity_examples():
    c5 = generate("cycle", {"n": 5})
    assert is_k_connected(c5, "node") and is_k_connected(c5, "edge")
    assert is_k_connected(TWO_TRIANGLES, "edge")
    assert not is_k_connected(TWO_TRIANGLES, "node")
    assert not is_k_connected(Graph.from_edges(2, [(0, 1)]), "node")


@given(connected_graphs(2, 8), st.data())
def test_connectivity_orderings_and_flow_oracle(g, data):
    s, t = data.draw(st.sampled_from(list(combinations(g.nodes, 2))))
    node, edge = st_connectivity(g, s, t, "node"), st_connectivity(g, s, t, "edge")
    assert node <= edge <= min(g.degree(s), g.degree(t))
    h = to_nx(g)
    assert edge == nx.edge_connectivity(h, s, t)
    if not g.has_edge(s, t):
        assert node == nx.node_connectivity(h, s, t)


@given(connected_graphs(3, 9))
def test_two_connected_iff_all_pairs(g):
    pairs = all(st_connectivity(g, s, t, "node") >= 2 for s, t in combinations(g.nodes, 2))
    assert is_k_connected(g, "node") == pairs == nx.is_biconnected(to_nx(g))
    assert is_k_connected(g, "edge") == nx.is_k_edge_connected(to_nx(g), 2)


@given(connected_graphs(2, 9))
def test_cut_vertices_and_bridges_match_networkx(g):
    h = to_nx(g)
    assert articulation_points(g.adjacency()) == set(nx.articulation_points(h))
    assert {tuple(sorted(b)) for b in bridges(g.adjacency())} == {tuple(sorted(b)) for b in nx.bridges(h)}


# --- block-cut tree ------------------------------------------------------


def test_block_cut_tree_examples():
    assert block_cut_tree(generate("cycle", {"n": 5})).tree.n == 1
    bct = block_cut_tree(Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)]))
    assert (len(bct.blocks), len(bct.cut_vertices), bct.tree.n) == (3, 2, 5)
    bct = block_cut_tree(TWO_TRIANGLES)
    assert (len(bct.blocks), bct.cut_vertices) == (2, (2,))


def test_block_cut_tree_needs_connected_graph():
    with pytest.raises(NotConnected):
        block_cut_tree(Graph.from_edges(4, [(0, 1), (2, 3)]))


@given(connected_graphs(2, 9))
def test_block_cut_tree_shape(g):
    bct = block_cut_tree(g)
    assert bct.tree.n == len(bct.blocks) + len(bct.cut_vertices)
    assert nx.is_tree(to_nx(bct.tree))
    assert {frozenset(b) for b in nx.biconnected_components(to_nx(g))} == set(bct.blocks)


# --- domination ----------------------------------------------------------


def test_dominates_examples():
    c5 = generate("cycle", {"n": 5})
    assert dominates(c5, c5.nodes)
    assert dominates(star(4), [4])
    assert not dominates(c5, [0])


@given(connected_graphs(1, 8), st.data())
def test_dominates_matches_networkx(g, data):
    s = data.draw(st.sets(st.sampled_from(list(g.nodes)), min_size=1))
    assert dominates(g, s) == nx.is_dominating_set(to_nx(g), s)


# --- generators ----------------------------------------------------------


def test_cycle_generator():
    assert [e.key for e in generate("cycle", {"n": 4}).edges] == [(0, 1), (0, 3), (1, 2), (2, 3)]


def test_generators_are_deterministic():
    assert generate("random_tree", {"n": 6}, 1) == generate("random_tree", {"n": 6}, 1)
    assert generate("gnp", {"n": 9, "p": 0.3, "costs": (1, 9)}, 4) == generate("gnp", {"n": 9, "p": 0.3, "costs": (1, 9)}, 4)


def edge_cycle_counts(g):
    h = to_nx(g)
    counts = {}
    for u, v in (e.key for e in g.edges):
        h.remove_edge(u, v)
        counts[(u, v)] = sum(1 for _ in nx.all_simple_paths(h, u, v))
        h.add_edge(u, v)
    return counts


def test_random_cactus_every_edge_on_one_cycle():
    g = generate("random_cactus", {"n": 7}, 3)
    assert set(edge_cycle_counts(g).values()) == {1}


@given(st.integers(3, 12), st.integers(3, 7), st.integers(0, 10_000))
def test_random_cactus_property(n, max_cycle, seed):
    if max_cycle == 3 and n % 2 == 0:
        with pytest.raises(BadParams):
            generate("random_cactus", {"n": n, "max_cycle": max_cycle}, seed)
        return
    g = generate("random_cactus", {"n": n, "max_cycle": max_cycle}, seed)
    assert g.n == n and is_connected(g)
    assert set(edge_cycle_counts(g).values()) == {1}


@given(st.integers(1, 15), st.integers(0, 1000))
def test_random_tree_is_tree(n, seed):
    assert nx.is_tree(to_nx(generate("random_tree", {"n": n}, seed)))


def test_grid_and_complete_sizes():
    assert generate("grid", {"rows": 2, "cols": 3}).m == 7
    assert generate("complete", {"n": 5}).m == 10


def test_generator_bad_params():
    with pytest.raises(BadParams):
        generate("gnp", {"n": 4, "p": 1.5})
    with pytest.raises(BadParams):
        generate("cycle", {"n": 2})
    with pytest.raises(BadParams):
        generate("nope", {"n": 3})
    with pytest.raises(BadParams):
        generate("random_tree", {"n": 0})


def test_connected_gnp_is_connected():
    for seed in range(20):
        assert is_connected(generate("gnp", {"n": 10, "p": 0.05, "connected": True}, seed))
