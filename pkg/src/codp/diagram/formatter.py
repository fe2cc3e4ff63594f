"""Canonical text rendering of diagram ASTs.

``parse_diagram(format_diagram(ast)) == ast`` for every valid AST; formatting
an AST obtained from :func:`parse_diagram` is therefore a stable, canonical
form (statements sorted, single spaces, no comments).
"""

from __future__ import annotations

from typing import Any

from .ast import DiagramAST, EdgeDecl, NodeDecl, ParamDecl, PortDecl, QueryDecl


def _fmt_value(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_ports(ports: tuple[PortDecl, ...]) -> str:
    return "[" + ", ".join(f"{p.name}:{p.desc}" for p in ports) + "]"


def _fmt_node(n: NodeDecl) -> str:
    return (f"node {n.name} bind {n.binding} "
            f"fun {_fmt_ports(n.fun_ports)} res {_fmt_ports(n.res_ports)}")


def _fmt_edge(keyword: str, e: EdgeDecl) -> str:
    return f"{keyword} {e.src} -> {e.dst}"


def _fmt_param(p: ParamDecl) -> str:
    return (f"param {p.name} domain {p.domain_desc} {p.kind} {p.binding} "
            f"-> {', '.join(p.targets)}")


def _fmt_query(q: QueryDecl) -> str:
    inner = ", ".join(f"{port}={_fmt_value(v)}" for port, v in q.assignments)
    return f"query {q.name} fix-fun [{inner}]"


def format_diagram(ast: DiagramAST) -> str:
    lines: list[str] = []
    lines.extend(_fmt_node(n) for n in ast.nodes)
    lines.extend(_fmt_edge("edge", e) for e in ast.edges)
    lines.extend(_fmt_edge("loop", e) for e in ast.loops)
    lines.extend(_fmt_param(p) for p in ast.params)
    lines.extend(_fmt_query(q) for q in ast.queries)
    return "\n".join(lines) + ("\n" if lines else "")
