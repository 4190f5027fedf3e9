import math
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biconn.crossing import (
    ExplicitOracle,
    ImplicitFamily,
    SetFamily,
    build_separability_graph,
    check_cover_criterion,
    cores,
    covers,
    cut_degree,
    exact_min_cover,
    family_generators,
    is_cactus,
    min_edge_cuts,
    separable,
    solve_crossing_aug,
    tree_cut_family,
    validate_family,
)
from biconn.errors import BadParams, CapExceeded, Infeasible, InvalidPair, NotACactus, Unsupported
from biconn.graph_core import Graph, generate
from biconn.solvers import exact_augmentation

from strategies import connected_graphs, tree_and_links

C4 = generate("cycle", {"n": 4})
C4_CUTS = family_generators("cactus_two_cuts", C4)
TWO_TRIANGLES = Graph.from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)])


def brute_force_cut_sets(g, d):
    """Every nonempty proper node set with exactly ``d`` boundary edges."""
    out = set()
    for k in range(1, g.n):
        for a in combinations(g.nodes, k):
            if sum(1 for e in g.edges if (e.u in a) != (e.v in a)) == d:
                out.add(frozenset(a))
    return out


def brute_force_covers(edges, members):
    return all(any((u in a) != (v in a) for u, v in edges) for a in members)


def all_pairs(n):
    return list(combinations(range(n), 2))


# --- families ------------------------------------------------------------


def test_flags_examples():
    assert validate_family(SetFamily.from_sets(4, [{0}, {1, 2, 3}])) == (True, True, True)
    singles = SetFamily.from_sets(4, [{0}, {1}, {2}, {3}])
    flags = validate_family(singles)
    assert flags.crossing and not flags.symmetric


def test_family_rejects_bad_members():
    with pytest.raises(BadParams):
        SetFamily.from_sets(3, [{0, 1, 2}])
    with pytest.raises(BadParams):
        SetFamily.from_sets(3, [set()])
    with pytest.raises(BadParams):
        SetFamily.from_sets(3, [{0}, {0}])


def test_c4_cut_family():
    assert set(C4_CUTS.members) == brute_force_cut_sets(C4, 2)
    assert len(C4_CUTS) == 12
    assert validate_family(C4_CUTS) == (True, True, True)
    assert sorted(cores(C4_CUTS), key=min) == [{0}, {1}, {2}, {3}]


def test_cores_examples():
    assert set(cores(SetFamily.from_sets(4, [{0}, {1, 2, 3}]))) == {frozenset({0}), frozenset({1, 2, 3})}
    assert cores(SetFamily.from_sets(4, [{1, 2}])) == [frozenset({1, 2})]


def test_two_triangles_cactus():
    fam = family_generators("cactus_two_cuts", TWO_TRIANGLES)
    assert set(fam.members) == brute_force_cut_sets(TWO_TRIANGLES, 2)
    assert validate_family(fam) == (True, True, True)


def test_not_a_cactus():
    assert not is_cactus(generate("complete", {"n": 4}))
    with pytest.raises(NotACactus):
        family_generators("cactus_two_cuts", generate("complete", {"n": 4}))
    with pytest.raises(NotACactus):
        family_generators("cactus_two_cuts", generate("random_tree", {"n": 5}, 2))


def test_min_edge_cuts_of_k4():
    fam = min_edge_cuts(generate("complete", {"n": 4}))
    assert set(fam.members) == {frozenset({v}) for v in range(4)} | {frozenset(set(range(4)) - {v}) for v in range(4)}
    with pytest.raises(CapExceeded):
        min_edge_cuts(generate("cycle", {"n": 13}))
    with pytest.raises(BadParams):
        family_generators("mystery", C4)


@given(st.integers(3, 10), st.integers(0, 10_000))
def test_random_cactus_families_are_symmetric_crossing(n, seed):
    g = generate("random_cactus", {"n": n}, seed)
    assert is_cactus(g)
    fam = family_generators("cactus_two_cuts", g)
    assert set(fam.members) == brute_force_cut_sets(g, 2)
    flags = validate_family(fam)
    assert flags.crossing and flags.symmetric


@given(connected_graphs(2, 7))
def test_min_edge_cuts_match_networkx(g):
    h = nx.Graph([e.key for e in g.edges])
    lam = nx.edge_connectivity(h)
    fam = min_edge_cuts(g)
    assert set(fam.members) == brute_force_cut_sets(g, lam)
    assert all(cut_degree(g, sum(1 << v for v in a)) == lam for a in fam.members)
    flags = validate_family(fam)
    assert flags.crossing and flags.symmetric


# --- covering and separability -------------------------------------------


def test_covers_examples():
    assert covers([(0, 1)], SetFamily.from_sets(4, [{0}, {1, 2, 3}]))[0]
    assert covers([(0, 2), (1, 3)], C4_CUTS) == (True, None)
    assert covers([(0, 2)], C4_CUTS) == (False, frozenset({1}))


def test_separable_examples():
    assert not separable((0, 2), (1, 3), C4_CUTS)
    ab = SetFamily.from_sets(4, [{0, 1}, {2, 3}])
    assert separable((0, 1), (2, 3), ab)
    with pytest.raises(InvalidPair):
        separable((0, 1), (1, 0), ab)


def test_separability_graph_examples():
    h = build_separability_graph(C4_CUTS, [(0, 2), (1, 3)])
    f, g = ("f", 0, 2), ("f", 1, 3)
    assert set(h.edges) == {(("c", 0), f), (("c", 2), f), (("c", 1), g), (("c", 3), g), (f, g)}
    assert h.cores_connected()
    empty = build_separability_graph(C4_CUTS, [])
    assert empty.edges == [] and not empty.cores_connected()
    one = build_separability_graph(C4_CUTS, [(0, 2)])
    assert set(one.edges) == {(("c", 0), ("f", 0, 2)), (("c", 2), ("f", 0, 2))}


def test_separability_graph_needs_symmetric_crossing():
    with pytest.raises(Unsupported):
        build_separability_graph(SetFamily.from_sets(4, [{0}, {1}]), [(0, 1)])


def test_cover_criterion_examples():
    assert check_cover_criterion(C4_CUTS, [(0, 2), (1, 3)])[:3] == (True, True, True)
    assert check_cover_criterion(C4_CUTS, [(0, 2)])[:3] == (True, False, False)


@st.composite
def cut_family_and_edges(draw):
    if draw(st.booleans()):
        n = draw(st.integers(3, 9))
        g = generate("random_cactus", {"n": n}, draw(st.integers(0, 10_000)))
        fam = family_generators("cactus_two_cuts", g)
    else:
        g = draw(connected_graphs(3, 7))
        fam = min_edge_cuts(g)
    J = draw(st.lists(st.sampled_from(all_pairs(g.n)), max_size=8, unique=True))
    return fam, J


@given(cut_family_and_edges())
def test_cover_criterion_on_symmetric_crossing_families(inst):
    fam, J = inst
    res = check_cover_criterion(fam, J)
    assert res.covers == brute_force_covers(J, fam.members)
    assert res.agree


@st.composite
def symmetric_family_and_edges(draw):
    n = draw(st.integers(3, 6))
    base = draw(st.lists(st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1), min_size=1, max_size=5))
    members = {frozenset(a) for a in base} | {frozenset(set(range(n)) - a) for a in base}
    J = draw(st.lists(st.sampled_from(all_pairs(n)), max_size=6, unique=True))
    return SetFamily.from_sets(n, sorted(members, key=lambda a: (len(a), sorted(a)))), J


@given(symmetric_family_and_edges())
def test_connected_cores_imply_cover_for_symmetric_families(inst):
    fam, J = inst
    res = check_cover_criterion(fam, J, check=False)
    if res.connected:
        assert res.covers


@given(cut_family_and_edges(), st.data())
def test_separability_symmetric_and_monotone(inst, data):
    fam, J = inst
    for f, g in combinations(J, 2):
        assert separable(f, g, fam) == separable(g, f, fam)
    extra = [p for p in all_pairs(fam.n) if p not in J]
    if extra and build_separability_graph(fam, J).cores_connected():
        g = data.draw(st.sampled_from(extra))
        assert build_separability_graph(fam, J + [g]).cores_connected()


@given(cut_family_and_edges())
def test_oracle_path_matches_explicit_scan(inst):
    fam, J = inst
    implicit = ImplicitFamily(fam.n, tuple(cores(fam)), ExplicitOracle(fam))
    for f, g in combinations(J, 2):
        assert separable(f, g, ExplicitOracle(fam)) == separable(f, g, fam)
    assert build_separability_graph(implicit, J).edges == build_separability_graph(fam, J).edges


# --- augmentation ---------------------------------------------------------


def test_crossing_aug_examples():
    r = solve_crossing_aug(C4_CUTS, [(0, 2), (1, 3)], oracle=True)
    assert r.chosen == ((0, 2), (1, 3)) and r.cost == 2 and r.exact_opt == 2
    one = SetFamily.from_sets(4, [{0, 1}, {2, 3}])
    assert solve_crossing_aug(one, [(0, 2), (0, 1)]).cost == 1
    with pytest.raises(Infeasible):
        solve_crossing_aug(C4_CUTS, [(0, 2)])


def test_exact_min_cover_examples():
    assert len(exact_min_cover(C4_CUTS, all_pairs(4))) == 2
    with pytest.raises(Infeasible):
        exact_min_cover(C4_CUTS, [(0, 1)])
    with pytest.raises(CapExceeded):
        exact_min_cover(C4_CUTS, all_pairs(8), cap=5)


@given(cut_family_and_edges())
def test_crossing_aug_covers_within_bound(inst):
    fam, J = inst
    if not brute_force_covers(J, fam.members):
        with pytest.raises(Infeasible):
            solve_crossing_aug(fam, J)
        return
    r = solve_crossing_aug(fam, J, oracle=True)
    assert brute_force_covers(r.chosen, fam.members)
    opt = r.exact_opt
    assert opt == min(k for k in range(len(J) + 1) if any(brute_force_covers(s, fam.members) for s in combinations(J, k)))
    assert r.cost <= 2 * math.log(max(r.extra["cores"], 2)) * opt + 1e-9
    implicit = ImplicitFamily(fam.n, tuple(cores(fam)), ExplicitOracle(fam))
    assert brute_force_covers(solve_crossing_aug(implicit, J).chosen, fam.members)


@given(tree_and_links(3, 8, 8, min_links=1))
def test_tree_cut_family_matches_edge_augmentation(inst):
    tree, links = inst
    fam = tree_cut_family(tree)
    ok = covers(links.keys, fam)[0]
    h = nx.Graph([e.key for e in tree.edges] + list(links.keys))
    assert ok == nx.is_k_edge_connected(h, 2)
    if ok:
        assert len(exact_min_cover(fam, links.keys)) == exact_augmentation(tree, links, "edge")[0]
