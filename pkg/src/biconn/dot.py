"""Graphviz DOT text for graphs, incidence graphs and separability graphs.

Terminals are drawn as boxes, everything else as ellipses; nodes and edges
come out in sorted order so the bytes are stable.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from .crossing import SeparabilityGraph
from .graph_core import Graph
from .incidence import IncidenceGraph


def _name(node) -> str:
    if isinstance(node, int):
        return str(node)
    tag = node[0]
    if tag == "f":
        return f"f:{node[1]}-{node[2]}"
    if tag == "e":
        return f"e:{node[1]}-{node[2]}"
    if tag == "v":
        return f"v:{node[1]}"
    return ":".join(str(x) for x in node)


def to_dot(obj: Union[Graph, IncidenceGraph, SeparabilityGraph], name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    if isinstance(obj, Graph):
        for v in obj.nodes:
            lines.append(f'  "{v}" [shape=ellipse];')
        for e in obj.edges:
            label = "" if e.cost == 1 else f' [label="{e.cost}"]'
            lines.append(f'  "{e.u}" -- "{e.v}"{label};')
    else:
        if isinstance(obj, SeparabilityGraph):
            names = {("c", i): "c:" + ",".join(map(str, sorted(c))) for i, c in enumerate(obj.cores)}
        else:
            names = {}
        terms = obj.terminals
        label = lambda x: names.get(x) or _name(x)  # noqa: E731
        for x in sorted(obj.adj):
            shape = "box" if x in terms else "ellipse"
            lines.append(f'  "{label(x)}" [shape={shape}];')
        for a, b in obj.edges:
            lines.append(f'  "{label(a)}" -- "{label(b)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(obj, path: Optional[Union[str, Path]] = None) -> bytes:
    data = to_dot(obj).encode()
    if path is not None:
        Path(path).write_bytes(data)
    return data
