import math
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biconn.embedding import SamplerConfig, sample_spanning_tree
from biconn.errors import BadParams, CapExceeded, EmptySolution, FilteredInput, Infeasible
from biconn.graph_core import EdgeSet, Graph, Tree, generate
from biconn.solvers import (
    build_sscds,
    dominating_block_tree_feasible,
    exact_2cds,
    exact_augmentation,
    exact_oracle,
    exact_quota_family,
    forest_is_tree,
    lift_accounting,
    lift_solution,
    reduce_to_block_tree,
    solve_2cds,
    solve_block_tree_aug,
    solve_quota_family,
    solve_tree_aug_ec,
    sscds_feasible,
    two_cds_feasible,
)
from biconn.steiner import nwst_ratio_bound

from strategies import connected_graphs, non_tree_pairs, tree_and_links, trees


def path(n, costs=None):
    costs = costs or {}
    return Tree.from_graph(Graph.from_edges(n, [(i, i + 1, costs.get(i, 1)) for i in range(n - 1)]))


def star(leaves=3):
    return Tree.from_graph(Graph.from_edges(leaves + 1, [(i, leaves) for i in range(leaves)]))


def nxg(edges, nodes=()):
    h = nx.Graph(list(edges))
    h.add_nodes_from(nodes)
    return h


def brute_force_2cds_edges(g):
    """Fewest edges of a 2-connected dominating subgraph, over all edge subsets."""
    edges = [e.key for e in g.edges]
    for k in range(3, len(edges) + 1):
        for sub in combinations(edges, k):
            h = nxg(sub)
            if nx.is_biconnected(h) and nx.is_dominating_set(nxg(edges, g.nodes), set(h.nodes)):
                return k
    return None


# --- lifting --------------------------------------------------------------


def test_lift_examples():
    tri = lift_solution(path(3), [(0, 2)])
    assert sorted(e.key for e in tri.edges) == [(0, 1), (0, 2), (1, 2)]
    c4 = lift_solution(path(4), [(0, 3)])
    assert nx.is_biconnected(nxg(e.key for e in c4.edges)) and c4.m == 4
    s = lift_solution(star(3), [(0, 1)])
    assert sorted(e.key for e in s.edges) == [(0, 1), (0, 3), (1, 3)]


def test_lift_empty():
    with pytest.raises(EmptySolution):
        lift_solution(path(3), [])


@given(tree_and_links(3, 10, 6, min_links=1), st.data())
def test_lift_accounting_holds_for_any_links(inst, data):
    tree, links = inst
    g = Graph(tree.n, tuple(sorted(tree.edges + links.edges, key=lambda e: e.key)))
    from biconn.embedding import measure_stretch

    sigma = measure_stretch(g, tree).sigma_max
    cost, ceiling = lift_accounting(tree, links, sigma)
    assert cost <= ceiling


# --- block-tree augmentation ---------------------------------------------


def test_bta_examples():
    assert solve_block_tree_aug(path(3), [(0, 2)]).chosen == ((0, 2),)
    r = solve_block_tree_aug(star(3), [(0, 1), (1, 2), (0, 2)], oracle=True)
    assert r.cost == 2 and r.exact_opt == 2 and r.ratio == 1
    assert solve_block_tree_aug(path(4), [(0, 3)]).chosen == ((0, 3),)


def test_bta_star_needs_two_edges():
    t = star(3)
    cands = [(0, 1), (1, 2), (0, 2)]
    one = [f for f in cands if nx.is_biconnected(nxg([e.key for e in t.edges] + [f]))]
    two = [p for p in combinations(cands, 2) if nx.is_biconnected(nxg([e.key for e in t.edges] + list(p)))]
    assert not one and len(two) == 3
    assert exact_augmentation(t, cands)[0] == 2


def test_bta_infeasible_and_small():
    with pytest.raises(Infeasible):
        solve_block_tree_aug(path(4), [(0, 2)])
    with pytest.raises(BadParams):
        solve_block_tree_aug(path(2), [])


def test_bta_lower_bound_confirmed_by_oracle():
    # star with 4 leaves and a perfect matching of leaf pairs plus a crossing edge
    t = star(4)
    r = solve_block_tree_aug(t, [(0, 1), (2, 3), (1, 2), (0, 3)], oracle=True)
    assert r.extra["leaf_lower_bound"] == 2
    assert r.exact_opt >= 2


@st.composite
def feasible_bta(draw, n_max=8):
    tree = draw(trees(3, n_max))
    pool = non_tree_pairs(tree)
    links = draw(st.lists(st.sampled_from(pool), min_size=1, max_size=min(len(pool), 10), unique=True))
    h = nxg([e.key for e in tree.edges] + links)
    if not nx.is_biconnected(h):
        links = pool[:14] if len(pool) > 14 else pool
        if not nx.is_biconnected(nxg([e.key for e in tree.edges] + links)):
            links = pool
    return tree, EdgeSet.for_tree(tree, links)


@given(feasible_bta())
def test_bta_against_oracle(inst):
    tree, links = inst
    if len(links) > 24 or not nx.is_biconnected(nxg([e.key for e in tree.edges] + list(links.keys))):
        return
    r = solve_block_tree_aug(tree, links, oracle=True)
    assert nx.is_biconnected(nxg([e.key for e in tree.edges] + list(r.chosen)))
    assert 1 <= r.ratio <= nwst_ratio_bound(r.extra["terminals"])
    assert r.exact_opt >= math.ceil(len(tree.leaves) / 2)
    assert solve_block_tree_aug(tree, links, exact=True).cost == r.exact_opt


# --- 2-edge-connected tree augmentation ----------------------------------


def test_taec_examples():
    r = solve_tree_aug_ec(path(3), [(0, 2, 5)])
    assert r.chosen == ((0, 2),) and r.cost == 5
    with pytest.warns(FilteredInput):
        r = solve_tree_aug_ec(path(3), [(0, 2, 5), (0, 1, 1)])
    assert r.cost == 5
    r = solve_tree_aug_ec(path(4), [(0, 2, 1), (1, 3, 1), (0, 3, 3)], oracle=True)
    assert r.chosen == ((0, 2), (1, 3)) and r.cost == 2 and r.exact_opt == 2


@given(tree_and_links(3, 8, 8, min_links=1), st.data())
def test_taec_against_oracle(inst, data):
    tree, links = inst
    costs = [data.draw(st.integers(1, 5)) for _ in links]
    es = EdgeSet.for_tree(tree, [(f.u, f.v, c) for f, c in zip(links, costs)])
    if not nx.is_k_edge_connected(nxg([e.key for e in tree.edges] + list(es.keys)), 2):
        with pytest.raises(Infeasible):
            solve_tree_aug_ec(tree, es)
        return
    r = solve_tree_aug_ec(tree, es, oracle=True)
    assert nx.is_k_edge_connected(nxg([e.key for e in tree.edges] + list(r.chosen)), 2)
    assert r.cost >= r.exact_opt
    assert solve_tree_aug_ec(tree, es, exact=True).cost == r.exact_opt


def test_exact_augmentation_caps():
    with pytest.raises(CapExceeded):
        exact_augmentation(path(13), [(0, 12)])


# --- block-cut tree reduction --------------------------------------------


@given(connected_graphs(3, 7), st.data())
def test_block_tree_reduction_preserves_two_connectivity(g, data):
    pool = [p for p in combinations(g.nodes, 2) if not g.has_edge(*p)]
    cands = data.draw(st.lists(st.sampled_from(pool), max_size=6, unique=True)) if pool else []
    red = reduce_to_block_tree(g, cands)
    if red.tree.n == 1:
        assert nx.is_biconnected(nxg(e.key for e in g.edges)) or g.n == 2
    for k in range(len(red.edges) + 1):
        for sub in combinations(red.edges.keys, k):
            original = [o for f in sub for o in red.origin[f]]
            lhs = nx.is_biconnected(nxg([e.key for e in g.edges] + original))
            assert lhs == red.two_connects(sub)
            if nx.is_biconnected(nxg([e.key for e in red.tree.edges] + list(sub), red.tree.nodes)):
                assert lhs


# --- dominating block tree / SSCDS ---------------------------------------


def test_sscds_whole_path_link():
    t = path(3)
    inst = build_sscds(t, [(0, 2)])
    assert inst.links == ((0, 2),)
    assert inst.groups.groups == (frozenset({0}),) * 3


def test_sscds_disjoint_paths_not_joined():
    t = path(5)
    inst = build_sscds(t, [(0, 2), (2, 4)])
    assert ("f", 2, 4) not in inst.adj[("f", 0, 2)]
    assert inst.groups.graph.m == 0
    # the link (2,4) makes 2 a neighbour of 4, so both links dominate node 4
    assert inst.groups.groups[4] == frozenset({0, 1})


def test_sscds_group_of_far_node():
    inst = build_sscds(path(6), [(0, 2), (3, 5)])
    assert inst.groups.groups[0] == frozenset({0})
    assert inst.groups.groups[4] == frozenset({1})
    # 3 touches 2 on the first link path
    assert inst.groups.groups[3] == frozenset({0, 1})


def test_sscds_undominated_node():
    t = Tree.from_graph(Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]))
    with pytest.raises(Infeasible):
        build_sscds(t, [(0, 2)])


@given(connected_graphs(3, 6), st.integers(0, 50))
def test_sscds_feasibility_equivalence(g, seed):
    tree = sample_spanning_tree(g, SamplerConfig(seed=seed))
    es = EdgeSet(tree, tuple(e for e in g.edges if not tree.has_edge(*e.key)))
    if not len(es) or len(es) > 10:
        return
    try:
        inst = build_sscds(tree, es)
    except Infeasible:
        for k in range(1, len(es) + 1):
            for sub in combinations(es.keys, k):
                assert not dominating_block_tree_feasible(g, tree, sub)
        return
    for k in range(1, len(es) + 1):
        for sub in combinations(es.keys, k):
            assert dominating_block_tree_feasible(g, tree, sub) == sscds_feasible(inst, sub)


# --- 2-connected dominating subgraph -------------------------------------


def test_2cds_cycle_and_k4():
    c5 = solve_2cds(generate("cycle", {"n": 5}), SamplerConfig(samples=3), oracle=True)
    assert c5.cost == 5 and c5.exact_opt == 5
    k4 = solve_2cds(generate("complete", {"n": 4}), SamplerConfig(samples=3), oracle=True)
    assert len(k4.nodes) == 3 and k4.cost == 3 and k4.extra["opt_nodes"] == 3


def test_exact_2cds_examples():
    assert exact_2cds(generate("complete", {"n": 4}))[:2] == (3, 3)
    assert exact_2cds(generate("cycle", {"n": 5}))[:2] == (5, 5)
    with pytest.raises(Infeasible):
        exact_2cds(generate("random_tree", {"n": 5}, 1))
    with pytest.raises(CapExceeded):
        exact_2cds(generate("cycle", {"n": 9}))


@given(connected_graphs(3, 6))
def test_exact_2cds_matches_edge_subset_brute_force(g):
    want = brute_force_2cds_edges(g)
    if want is None:
        with pytest.raises(Infeasible):
            exact_2cds(g)
    else:
        assert exact_2cds(g)[0] == want


@given(connected_graphs(3, 7), st.integers(0, 20))
def test_2cds_output_is_verified(g, seed):
    r = solve_2cds(g, SamplerConfig(samples=2, seed=seed))
    try:
        opt = exact_2cds(g)[0]
    except Infeasible:
        assert not r.feasible
        return
    assert r.feasible
    assert two_cds_feasible(g, r.edges)
    assert r.cost >= opt
    assert r.extra["num_nodes"] <= r.cost


# --- k-subgraph / quota / budget -----------------------------------------


def test_quota_zero_is_empty():
    r = solve_quota_family(generate("cycle", {"n": 5}), "quota", 0)
    assert r.feasible and r.chosen == () and r.cost == 0


def test_k_subgraph_on_cycle():
    r = solve_quota_family(generate("cycle", {"n": 5}), "k_subgraph", 5, SamplerConfig(samples=2), oracle=True)
    assert r.cost == 5 and r.exact_opt == 5


def test_budget_below_cheapest_cycle_is_empty():
    g = generate("cycle", {"n": 5, "costs": (2, 2)})
    r = solve_quota_family(g, "budget", 9)
    assert r.feasible and r.chosen == () and r.extra["profit"] == 0


def test_quota_family_bad_mode():
    with pytest.raises(BadParams):
        solve_quota_family(generate("cycle", {"n": 5}), "median", 1)


@given(connected_graphs(4, 7, costs=True, profits=True), st.sampled_from(["k_subgraph", "quota", "budget"]), st.integers(1, 14), st.integers(0, 9))
def test_quota_family_against_oracle(g, mode, target, seed):
    if g.m > 14:
        return
    if mode == "k_subgraph":
        target = min(target, g.n)
    r = solve_quota_family(g, mode, target, SamplerConfig(samples=2, seed=seed), oracle=True)
    try:
        value, _ = exact_quota_family(g, mode, target)
    except Infeasible:
        assert not r.feasible
        return
    if not r.chosen:
        # budget may legitimately come back empty
        assert mode == "budget"
        return
    h = nxg(r.edges)
    assert nx.is_biconnected(h)
    nodes = set(h.nodes)
    profit = sum(g.profit(v) for v in nodes)
    if mode == "k_subgraph":
        assert len(nodes) >= target and r.cost >= value
    elif mode == "quota":
        assert profit >= target and r.cost >= value
    else:
        assert r.cost <= target and profit <= value
    tree = Tree.from_graph(Graph.from_edges(g.n, [g.edge(*k) for k in r.extra["tree_edges"]]))
    es = EdgeSet(tree, tuple(g.edge(*k) for k in r.chosen))
    assert forest_is_tree(tree, es)
    cost, ceiling = lift_accounting(tree, es, r.sigma_max)
    assert cost == r.cost <= ceiling


def test_exact_oracle_dispatch():
    assert exact_oracle("bta", tree=star(3), edges=[(0, 1), (1, 2), (0, 2)])[0] == 2
    assert exact_oracle("2cds", graph=generate("complete", {"n": 4}))[0] == 3
    assert exact_oracle("quota", graph=generate("cycle", {"n": 4}), target=2)[0] == 4
    with pytest.raises(BadParams):
        exact_oracle("tsp")
