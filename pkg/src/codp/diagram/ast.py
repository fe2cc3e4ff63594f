"""Abstract syntax for .codp interconnection diagrams.

A diagram is a list of statements: nodes (with functionality and resource
ports), edges from resource ports to functionality ports, loop edges closed
by feedback, parameter boxes, and named queries. ASTs canonicalize their
statement order at construction, so parsing the formatted text of any AST
reproduces it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable


@dataclass(frozen=True)
class PortDecl:
    """A named port with a poset descriptor such as ``real(g)``."""

    name: str
    desc: str


@dataclass(frozen=True)
class NodeDecl:
    name: str
    binding: str
    fun_ports: tuple[PortDecl, ...]
    res_ports: tuple[PortDecl, ...]
    line: int = field(default=0, compare=False)

    def fun_port(self, name: str) -> PortDecl | None:
        return next((p for p in self.fun_ports if p.name == name), None)

    def res_port(self, name: str) -> PortDecl | None:
        return next((p for p in self.res_ports if p.name == name), None)


@dataclass(frozen=True)
class EdgeDecl:
    """Connects a resource port (producer side) to a functionality port."""

    src_node: str
    src_port: str
    dst_node: str
    dst_port: str
    line: int = field(default=0, compare=False)

    @property
    def src(self) -> str:
        return f"{self.src_node}.{self.src_port}"

    @property
    def dst(self) -> str:
        return f"{self.dst_node}.{self.dst_port}"


@dataclass(frozen=True)
class ParamDecl:
    """A parameter box bound to a kernel or a deterministic family."""

    name: str
    domain_desc: str
    kind: str  # "kernel" or "fn"
    binding: str
    targets: tuple[str, ...]
    line: int = field(default=0, compare=False)


@dataclass(frozen=True)
class QueryDecl:
    """A named fix-functionality query with per-port values."""

    name: str
    assignments: tuple[tuple[str, Any], ...]
    line: int = field(default=0, compare=False)


def _edge_key(e: EdgeDecl) -> tuple:
    return (e.src_node, e.src_port, e.dst_node, e.dst_port)


@dataclass(frozen=True)
class DiagramAST:
    """A whole diagram, with statements held in canonical order."""

    nodes: tuple[NodeDecl, ...]
    edges: tuple[EdgeDecl, ...]
    loops: tuple[EdgeDecl, ...]
    params: tuple[ParamDecl, ...]
    queries: tuple[QueryDecl, ...]

    def __init__(self, nodes: Iterable[NodeDecl] = (),
                 edges: Iterable[EdgeDecl] = (),
                 loops: Iterable[EdgeDecl] = (),
                 params: Iterable[ParamDecl] = (),
                 queries: Iterable[QueryDecl] = ()) -> None:
        object.__setattr__(self, "nodes",
                           tuple(sorted(nodes, key=lambda n: n.name)))
        object.__setattr__(self, "edges", tuple(sorted(edges, key=_edge_key)))
        object.__setattr__(self, "loops", tuple(sorted(loops, key=_edge_key)))
        object.__setattr__(self, "params",
                           tuple(sorted(params, key=lambda p: p.name)))
        object.__setattr__(self, "queries",
                           tuple(sorted(queries, key=lambda q: q.name)))

    def node(self, name: str) -> NodeDecl | None:
        return next((n for n in self.nodes if n.name == name), None)

    def all_edges(self) -> tuple[EdgeDecl, ...]:
        return self.edges + self.loops


def ast_to_json(ast: DiagramAST) -> dict:
    """Plain-data export of the AST (stable field order)."""
    return {
        "nodes": [{"name": n.name, "bind": n.binding,
                   "fun": [{"name": p.name, "desc": p.desc} for p in n.fun_ports],
                   "res": [{"name": p.name, "desc": p.desc} for p in n.res_ports]}
                  for n in ast.nodes],
        "edges": [{"src": e.src, "dst": e.dst} for e in ast.edges],
        "loops": [{"src": e.src, "dst": e.dst} for e in ast.loops],
        "params": [{"name": p.name, "domain": p.domain_desc, "kind": p.kind,
                    "bind": p.binding, "targets": list(p.targets)}
                   for p in ast.params],
        "queries": [{"name": q.name,
                     "assignments": [{"port": port, "value": value}
                                     for port, value in q.assignments]}
                    for q in ast.queries],
    }
