"""JSON instance and report files.

Numbers that may be fractional (costs, profits, targets) are written as an
integer when whole and as a ``"p/q"`` string otherwise, so files round-trip
exactly.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import jsonschema

from .crossing import SetFamily
from .errors import BadParams, BiconnError, SchemaError, VersionMismatch
from .graph_core import Edge, EdgeSet, Graph, Tree, as_cost, key
from .solvers import SolutionReport

FORMAT_VERSION = 1
INSTANCE_KINDS = ("graph", "bta", "family", "quota")

_num = {"anyOf": [{"type": "integer", "minimum": 0}, {"type": "number", "minimum": 0}, {"type": "string", "pattern": r"^\d+(/\d+)?$"}]}
_edge = {
    "type": "object",
    "required": ["u", "v"],
    "properties": {"u": {"type": "integer", "minimum": 0}, "v": {"type": "integer", "minimum": 0}, "cost": _num},
    "additionalProperties": False,
}
_edges = {"type": "array", "items": _edge}
_header = {
    "format_version": {"const": FORMAT_VERSION},
    "kind": {"enum": list(INSTANCE_KINDS)},
    "seed": {"type": "integer"},
    "check": {"type": "object"},
}
_graph_props = {"n": {"type": "integer", "minimum": 1}, "edges": _edges, "profits": {"type": "array", "items": _num}}

SCHEMAS = {
    "graph": {"type": "object", "required": ["format_version", "kind", "n", "edges"], "properties": {**_header, **_graph_props}, "additionalProperties": False},
    "bta": {
        "type": "object",
        "required": ["format_version", "kind", "n", "tree_edges", "candidate_edges"],
        "properties": {**_header, "n": {"type": "integer", "minimum": 1}, "tree_edges": _edges, "candidate_edges": _edges},
        "additionalProperties": False,
    },
    "family": {
        "type": "object",
        "required": ["format_version", "kind", "groundset_n", "members"],
        "properties": {
            **_header,
            "groundset_n": {"type": "integer", "minimum": 2},
            "members": {"type": "array", "items": {"type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 1}},
            "candidate_edges": _edges,
        },
        "additionalProperties": False,
    },
    "quota": {
        "type": "object",
        "required": ["format_version", "kind", "n", "edges", "mode"],
        "properties": {
            **_header,
            **_graph_props,
            "mode": {"enum": ["k_subgraph", "quota", "budget"]},
            "k": {"type": "integer"},
            "Q": _num,
            "B": _num,
            "root": {"type": "integer", "minimum": 0},
        },
        "additionalProperties": False,
    },
}

TARGET_KEY = {"k_subgraph": "k", "quota": "Q", "budget": "B"}


def enc(x) -> Union[int, str, float, None]:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return x


def dec(x) -> Fraction:
    return as_cost(x)


@dataclass
class Instance:
    kind: str
    seed: Optional[int] = None
    graph: Optional[Graph] = None
    tree: Optional[Tree] = None
    edges: Optional[EdgeSet] = None
    family: Optional[SetFamily] = None
    candidates: Tuple[Tuple[int, int], ...] = ()
    mode: Optional[str] = None
    target: Optional[Fraction] = None
    root: Optional[int] = None
    check: Dict[str, Any] = field(default_factory=dict)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path) if path else ""


def _edge_list(raw: List[dict], n: int, where: str) -> List[Edge]:
    seen = {}
    out = []
    for i, e in enumerate(raw):
        u, v = e["u"], e["v"]
        ptr = f"{where}/{i}"
        if u == v:
            raise SchemaError(ptr, f"self-loop on node {u}")
        if u >= n or v >= n:
            raise SchemaError(ptr, f"endpoint out of range 0..{n - 1}")
        k = key(u, v)
        if k in seen:
            raise SchemaError(ptr, f"duplicate of edge at {where}/{seen[k]}")
        seen[k] = i
        try:
            cost = dec(e.get("cost", 1))
        except BadParams as exc:
            raise SchemaError(ptr + "/cost", str(exc)) from None
        out.append(Edge(k[0], k[1], cost))
    return out


def _graph(doc: dict, edge_field: str = "edges") -> Graph:
    n = doc["n"]
    edges = _edge_list(doc[edge_field], n, "/" + edge_field)
    profits = doc.get("profits")
    if profits is not None:
        if len(profits) != n:
            raise SchemaError("/profits", f"expected {n} profits, got {len(profits)}")
        profits = tuple(dec(p) for p in profits)
    return Graph(n, tuple(edges), profits)


def instance_from_dict(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise SchemaError("", "instance must be a JSON object")
    version = doc.get("format_version")
    if version is not None and version != FORMAT_VERSION:
        raise VersionMismatch(f"format_version {version} (expected {FORMAT_VERSION})")
    kind = doc.get("kind")
    if kind not in SCHEMAS:
        raise SchemaError("/kind", f"unknown kind {kind!r}")
    try:
        jsonschema.validate(doc, SCHEMAS[kind])
    except jsonschema.ValidationError as exc:
        raise SchemaError(_pointer(exc.absolute_path), exc.message) from None
    inst = Instance(kind, doc.get("seed"), check=dict(doc.get("check", {})))
    try:
        if kind == "graph":
            inst.graph = _graph(doc)
        elif kind == "bta":
            n = doc["n"]
            tedges = _edge_list(doc["tree_edges"], n, "/tree_edges")
            try:
                inst.tree = Tree(n, tuple(tedges))
            except BiconnError as exc:
                raise SchemaError("/tree_edges", str(exc)) from None
            cands = _edge_list(doc["candidate_edges"], n, "/candidate_edges")
            for i, e in enumerate(cands):
                if inst.tree.has_edge(*e.key):
                    raise SchemaError(f"/candidate_edges/{i}", "duplicates a tree edge")
            inst.edges = EdgeSet.for_tree(inst.tree, cands)
        elif kind == "family":
            n = doc["groundset_n"]
            full = set(range(n))
            seen = {}
            for i, member in enumerate(doc["members"]):
                s = frozenset(member)
                if not s <= full:
                    raise SchemaError(f"/members/{i}", f"node out of range 0..{n - 1}")
                if s == full:
                    raise SchemaError(f"/members/{i}", "members must be proper subsets of the groundset")
                if len(s) != len(member):
                    raise SchemaError(f"/members/{i}", "repeated node")
                if s in seen:
                    raise SchemaError(f"/members/{i}", f"duplicate of /members/{seen[s]}")
                seen[s] = i
            inst.family = SetFamily.from_sets(n, doc["members"])
            inst.candidates = tuple(e.key for e in _edge_list(doc.get("candidate_edges", []), n, "/candidate_edges"))
        else:
            inst.graph = _graph(doc)
            inst.mode = doc["mode"]
            tk = TARGET_KEY[inst.mode]
            if tk not in doc:
                raise SchemaError("", f"mode {inst.mode} needs field {tk!r}")
            extra = [k for k in TARGET_KEY.values() if k != tk and k in doc]
            if extra:
                raise SchemaError("/" + extra[0], f"field not allowed with mode {inst.mode}")
            inst.target = Fraction(doc[tk]) if tk == "k" else dec(doc[tk])
            inst.root = doc.get("root")
            if inst.root is not None and inst.root >= inst.graph.n:
                raise SchemaError("/root", "root out of range")
    except SchemaError:
        raise
    except BiconnError as exc:
        raise SchemaError("", str(exc)) from None
    return inst


def parse_instance(source: Union[str, Path, bytes]) -> Instance:
    """Parse from a path or raw JSON bytes."""
    raw = source if isinstance(source, bytes) else Path(source).read_bytes()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from None
    return instance_from_dict(doc)


def _edges_out(edges) -> List[dict]:
    out = []
    for e in edges:
        d = {"u": e.u, "v": e.v}
        if e.cost != 1:
            d["cost"] = enc(e.cost)
        out.append(d)
    return out


def instance_to_dict(inst: Instance) -> dict:
    doc: Dict[str, Any] = {"format_version": FORMAT_VERSION, "kind": inst.kind}
    if inst.seed is not None:
        doc["seed"] = inst.seed
    if inst.check:
        doc["check"] = inst.check
    if inst.kind in ("graph", "quota"):
        g = inst.graph
        doc["n"] = g.n
        doc["edges"] = _edges_out(g.edges)
        if g.node_profits is not None:
            doc["profits"] = [enc(p) for p in g.node_profits]
    if inst.kind == "quota":
        doc["mode"] = inst.mode
        tk = TARGET_KEY[inst.mode]
        doc[tk] = int(inst.target) if tk == "k" else enc(inst.target)
        if inst.root is not None:
            doc["root"] = inst.root
    if inst.kind == "bta":
        doc["n"] = inst.tree.n
        doc["tree_edges"] = _edges_out(inst.tree.edges)
        doc["candidate_edges"] = _edges_out(inst.edges)
    if inst.kind == "family":
        doc["groundset_n"] = inst.family.n
        doc["members"] = [sorted(m) for m in inst.family.members]
        if inst.candidates:
            doc["candidate_edges"] = [{"u": u, "v": v} for u, v in inst.candidates]
    return doc


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, default=_default) + "\n"


def _default(x):
    if isinstance(x, Fraction):
        return enc(x)
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def write_instance(inst: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps(instance_to_dict(inst)))


def digest(inst: Instance) -> str:
    canon = json.dumps(instance_to_dict(inst), sort_keys=True, separators=(",", ":"), default=_default)
    return hashlib.sha256(canon.encode()).hexdigest()


def report_to_dict(report: SolutionReport, inst: Instance, *, timings: bool = False) -> dict:
    doc = {
        "problem": report.problem,
        "input_digest": digest(inst),
        "seed": report.seed,
        "config": report.config,
        "feasible": report.feasible,
        "solution": {"chosen": [list(e) for e in report.chosen], "edges": [list(e) for e in report.edges], "nodes": list(report.nodes)},
        "cost": report.cost,
        "reduced_cost": report.reduced_cost,
        "sigma_max": report.sigma_max,
        "reference_bound_tag": report.reference_bound_tag,
        "reference_ratio_bound": report.reference_ratio_bound,
        "extra": report.extra,
        "timings_ms": {"total": report.wall_ms} if timings else None,
    }
    if report.exact_opt is not None:
        doc["exact_opt"] = report.exact_opt
        doc["ratio"] = report.ratio
    return doc
