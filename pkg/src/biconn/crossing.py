"""Set families over a small groundset, covering by edges, and the
separability graph whose core connectivity decides whether a set of edges
covers a symmetric crossing family.

Members are stored as bitmasks (bit ``i`` = node ``i``) and exposed as
frozensets.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Protocol, Sequence, Tuple, Union

from .errors import BadParams, CapExceeded, Infeasible, InvalidPair, InvariantViolation, NotACactus, Unsupported
from .graph_core import Graph, Key, adjacency_from_edges, block_cut_tree, connected_components, is_two_connected_adj, key
from .incidence import link
from .solvers import BTA_BOUND, SolutionReport
from .steiner import NwstInstance, nwst_exact_small, nwst_greedy, nwst_ratio_bound

MIN_CUT_CAP = 12
COVER_CAP = 22


def _mask(nodes: Iterable[int]) -> int:
    m = 0
    for v in nodes:
        m |= 1 << v
    return m


def _nodes(mask: int) -> FrozenSet[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def _order(mask: int):
    return (bin(mask).count("1"), sorted(_nodes(mask)))


class FamilyFlags(NamedTuple):
    crossing: bool
    symmetric: bool
    proper: bool


@dataclass(frozen=True)
class SetFamily:
    n: int
    masks: Tuple[int, ...]

    def __post_init__(self):
        if self.n < 2:
            raise BadParams("groundset needs at least 2 nodes")
        full = (1 << self.n) - 1
        seen = set()
        for i, m in enumerate(self.masks):
            if m <= 0 or m >= full or m & ~full:
                raise BadParams(f"member {i} is not a nonempty proper subset of the groundset")
            if m in seen:
                raise BadParams(f"member {i} is a duplicate")
            seen.add(m)

    @classmethod
    def from_sets(cls, n: int, members: Iterable[Iterable[int]]) -> "SetFamily":
        masks = []
        for A in members:
            A = list(A)
            if any(not 0 <= v < n for v in A):
                raise BadParams(f"member {sorted(A)} leaves the groundset 0..{n - 1}")
            masks.append(_mask(A))
        return cls(n, tuple(sorted(masks, key=_order)))

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @property
    def members(self) -> List[FrozenSet[int]]:
        return [_nodes(m) for m in self.masks]

    def __len__(self):
        return len(self.masks)

    @cached_property
    def _lookup(self) -> FrozenSet[int]:
        return frozenset(self.masks)

    def __contains__(self, nodes) -> bool:
        return (nodes if isinstance(nodes, int) else _mask(nodes)) in self._lookup

    def crosses(self, a: int, b: int) -> bool:
        return bool(a & b) and bool(a & ~b) and bool(b & ~a) and bool(self.full & ~(a | b))

    @cached_property
    def flags(self) -> FamilyFlags:
        has = self._lookup
        symmetric = all(self.full ^ a in has for a in self.masks)
        crossing = proper = True
        for a, b in combinations(self.masks, 2):
            if not self.crosses(a, b):
                continue
            if a & b not in has or a | b not in has:
                crossing = False
            if a ^ b in has:
                proper = False
        return FamilyFlags(crossing, symmetric, proper)

    @cached_property
    def core_masks(self) -> Tuple[int, ...]:
        return tuple(a for a in self.masks if not any(b != a and b & a == b for b in self.masks))


def validate_family(family: SetFamily) -> FamilyFlags:
    return family.flags


def cores(family: SetFamily) -> List[FrozenSet[int]]:
    """Inclusion-minimal members; pairwise disjoint for symmetric crossing families."""
    found = family.core_masks
    flags = family.flags
    if flags.crossing and flags.symmetric:
        for a, b in combinations(found, 2):
            if a & b:
                raise InvariantViolation(f"cores {sorted(_nodes(a))} and {sorted(_nodes(b))} intersect")
    return [_nodes(m) for m in found]


def _covers_mask(f: Key, a: int) -> bool:
    return bool(a >> f[0] & 1) != bool(a >> f[1] & 1)


def _canon(edges) -> List[Key]:
    out = set()
    for e in edges:
        u, v = e[0], e[1]
        if u == v:
            raise BadParams(f"self-loop ({u},{v})")
        out.add(key(u, v))
    return sorted(out)


def covers(edges, family: SetFamily) -> Tuple[bool, Optional[FrozenSet[int]]]:
    """(True, None) when every member has an edge with exactly one end inside it,
    else (False, first uncovered member)."""
    J = _canon(edges)
    for a in family.masks:
        if not any(_covers_mask(f, a) for f in J):
            return False, _nodes(a)
    return True, None


class FamilyOracle(Protocol):
    def uncovered(self, edges: Sequence[Key], s: int, t: int) -> Optional[FrozenSet[int]]:
        """A member not covered by ``edges`` containing exactly one of ``s, t``, if any."""


@dataclass(frozen=True)
class ExplicitOracle:
    family: SetFamily

    def uncovered(self, edges, s, t):
        J = _canon(edges)
        st = (1 << s) | (1 << t)
        for a in self.family.masks:
            if bin(a & st).count("1") == 1 and not any(_covers_mask(f, a) for f in J):
                return _nodes(a)
        return None


@dataclass(frozen=True)
class ImplicitFamily:
    """A family known only through an oracle plus its list of cores."""

    n: int
    cores: Tuple[FrozenSet[int], ...]
    oracle: FamilyOracle


def separable(f, g, family: Union[SetFamily, FamilyOracle]) -> bool:
    """Some member holds both ends of one edge and no end of the other."""
    f, g = key(*f), key(*g)
    if f == g:
        raise InvalidPair(f"separable needs two distinct edges, got {f} twice")
    if isinstance(family, SetFamily):
        fm, gm = _mask(f), _mask(g)
        for a in family.masks:
            if (a & fm == fm and not a & gm) or (a & gm == gm and not a & fm):
                return True
        return False
    for s in f:
        for t in g:
            if s != t and family.uncovered([f, g], s, t) is not None:
                return True
    return False


@dataclass(frozen=True)
class SeparabilityGraph:
    cores: Tuple[FrozenSet[int], ...]
    edges_j: Tuple[Key, ...]
    adj: Dict[Tuple, FrozenSet[Tuple]]

    @property
    def terminals(self) -> FrozenSet[Tuple]:
        return frozenset(("c", i) for i in range(len(self.cores)))

    @property
    def edges(self) -> List[Tuple[Tuple, Tuple]]:
        return sorted((a, b) for a in self.adj for b in self.adj[a] if a < b)

    def cores_connected(self) -> bool:
        terms = sorted(self.terminals)
        if len(terms) <= 1:
            return True
        for comp in connected_components(self.adj):
            if terms[0] in comp:
                return all(t in comp for t in terms)
        return False


def _assemble(core_list: Sequence[FrozenSet[int]], J: List[Key], sep: Callable[[Key, Key], bool]) -> SeparabilityGraph:
    adj = {("c", i): set() for i in range(len(core_list))}
    for f in J:
        adj[link(f)] = set()
    for i, c in enumerate(core_list):
        cm = _mask(c)
        for f in J:
            if _covers_mask(f, cm):
                adj[("c", i)].add(link(f))
                adj[link(f)].add(("c", i))
    for f, g in combinations(J, 2):
        if not sep(f, g):
            adj[link(f)].add(link(g))
            adj[link(g)].add(link(f))
    return SeparabilityGraph(tuple(core_list), tuple(J), {k: frozenset(v) for k, v in sorted(adj.items())})


def build_separability_graph(family: Union[SetFamily, ImplicitFamily], edges, *, check: bool = True) -> SeparabilityGraph:
    """Cores plus edges; core--edge when the edge covers the core, edge--edge when inseparable.

    ``check=False`` skips the symmetric-crossing requirement (used to probe
    families that are only symmetric).
    """
    J = _canon(edges)
    if isinstance(family, ImplicitFamily):
        return _assemble(family.cores, J, lambda f, g: separable(f, g, family.oracle))
    if check:
        flags = family.flags
        if not (flags.crossing and flags.symmetric):
            raise Unsupported("separability criterion needs a symmetric crossing family")
        core_list = cores(family)
    else:
        core_list = [_nodes(m) for m in family.core_masks]
    return _assemble(core_list, J, lambda f, g: separable(f, g, family))


class CoverCheck(NamedTuple):
    agree: bool
    covers: bool
    connected: bool
    witness: Optional[FrozenSet[int]]


def check_cover_criterion(family: SetFamily, edges, *, check: bool = True) -> CoverCheck:
    ok, witness = covers(edges, family)
    connected = build_separability_graph(family, edges, check=check).cores_connected()
    return CoverCheck(ok == connected, ok, connected, witness)


def _covers_via_oracle(fam: ImplicitFamily, J: List[Key]) -> bool:
    # every nonempty proper member separates some node pair, so querying all pairs is complete
    return all(fam.oracle.uncovered(J, s, t) is None for s, t in combinations(range(fam.n), 2))


def solve_crossing_aug(family: Union[SetFamily, ImplicitFamily], edges, *, exact: bool = False, oracle: bool = False, cap: int = 20) -> SolutionReport:
    """Few edges from ``edges`` covering the family, via Steiner trees on the separability graph."""
    E = _canon(edges)
    explicit = isinstance(family, SetFamily)
    if explicit:
        if not covers(E, family)[0]:
            raise Infeasible("the candidate edges do not cover the family")
    elif not _covers_via_oracle(family, E):
        raise Infeasible("the candidate edges do not cover the family")
    h = build_separability_graph(family, E)
    inst = NwstInstance.from_adjacency(h.adj, h.terminals)
    sol = nwst_exact_small(inst, cap) if exact else nwst_greedy(inst)
    chosen = sorted((lab[1], lab[2]) for lab in (inst.label(v) for v in sol.nodes) if lab[0] == "f")
    ok = covers(chosen, family)[0] if explicit else _covers_via_oracle(family, chosen)
    if not ok:
        raise InvariantViolation("Steiner tree on the separability graph does not cover the family")
    report = SolutionReport(
        "crossaug",
        True,
        tuple(chosen),
        (),
        tuple(chosen),
        Fraction(len(chosen)),
        Fraction(len(chosen)),
        reference_ratio_bound=BTA_BOUND[0],
        reference_bound_tag=BTA_BOUND[1],
        config={"exact": exact},
        extra={"cores": len(h.cores), "greedy_bound": nwst_ratio_bound(len(h.cores))},
    )
    if oracle and explicit:
        report = report.with_opt(len(exact_min_cover(family, E)))
    return report


def exact_min_cover(family: SetFamily, edges, cap: int = COVER_CAP) -> Tuple[Key, ...]:
    """Smallest subset of ``edges`` covering every member."""
    E = _canon(edges)
    if len(E) > cap:
        raise CapExceeded(f"cover oracle cap |E| <= {cap}")
    want = (1 << len(family.masks)) - 1
    hits = [sum(1 << i for i, a in enumerate(family.masks) if _covers_mask(f, a)) for f in E]
    if want == 0:
        return ()
    total = 0
    for h in hits:
        total |= h
    if total != want:
        raise Infeasible("the candidate edges do not cover the family")
    for k in range(1, len(E) + 1):
        for combo in combinations(range(len(E)), k):
            acc = 0
            for i in combo:
                acc |= hits[i]
            if acc == want:
                return tuple(E[i] for i in combo)
    raise AssertionError("unreachable: the full edge set covers")


# ---------------------------------------------------------------------------
# generators


def is_cactus(g: Graph) -> bool:
    """Connected, and every block is a cycle (so every edge lies on exactly one cycle)."""
    if g.n < 3:
        return False
    adj = g.adjacency()
    if not is_two_connected_adj(adj, "edge"):
        return False
    for block in block_cut_tree(g).blocks:
        inner = sum(1 for e in g.edges if e.u in block and e.v in block)
        if inner != len(block):
            return False
    return True


def _sides(g: Graph, removed: Sequence[Key]) -> List[int]:
    gone = set(removed)
    adj = adjacency_from_edges((e.key for e in g.edges if e.key not in gone), g.nodes)
    return [_mask(c) for c in connected_components(adj)]


def cactus_two_cuts(g: Graph) -> SetFamily:
    """All node sets with exactly two cactus edges leaving them."""
    if not is_cactus(g):
        raise NotACactus("every block must be a cycle")
    masks = set()
    for block in block_cut_tree(g).blocks:
        cyc = [e.key for e in g.edges if e.u in block and e.v in block]
        for pair in combinations(cyc, 2):
            parts = _sides(g, pair)
            if len(parts) != 2:
                raise InvariantViolation(f"removing {pair} left {len(parts)} components")
            masks.update(parts)
    return SetFamily(g.n, tuple(sorted(masks, key=_order)))


def cut_degree(g: Graph, mask: int) -> int:
    return sum(1 for e in g.edges if (mask >> e.u & 1) != (mask >> e.v & 1))


def min_edge_cuts(g: Graph, cap: int = MIN_CUT_CAP) -> SetFamily:
    """All sets whose boundary has exactly lambda(G) edges, by enumeration."""
    if g.n > cap:
        raise CapExceeded(f"min-cut enumeration cap n <= {cap}")
    if g.n < 2:
        raise BadParams("needs at least 2 nodes")
    full = (1 << g.n) - 1
    degs = {m: cut_degree(g, m) for m in range(1, full)}
    lam = min(degs.values())
    return SetFamily(g.n, tuple(sorted((m for m, d in degs.items() if d == lam), key=_order)))


def tree_cut_family(tree: Graph) -> SetFamily:
    """Both sides of every tree edge; covering it means ``T + J`` is 2-edge-connected."""
    masks = set()
    for e in tree.edges:
        masks.update(_sides(tree, [e.key]))
    return SetFamily(tree.n, tuple(sorted(masks, key=_order)))


FAMILY_KINDS = ("cactus_two_cuts", "min_edge_cuts", "explicit", "tree_cuts")


def family_generators(kind: str, source, caps: Optional[Dict] = None) -> SetFamily:
    """``source`` is a Graph, or ``(n, members)`` for ``explicit``."""
    caps = caps or {}
    if kind == "cactus_two_cuts":
        return cactus_two_cuts(source)
    if kind == "min_edge_cuts":
        return min_edge_cuts(source, caps.get("n", MIN_CUT_CAP))
    if kind == "explicit":
        n, members = source
        return SetFamily.from_sets(n, members)
    if kind == "tree_cuts":
        return tree_cut_family(source)
    raise BadParams(f"unknown family kind {kind!r}")
