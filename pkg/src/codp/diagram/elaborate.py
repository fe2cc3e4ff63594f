"""Structural checks and compilation of diagrams into design problems.

``validate`` rejects ill-typed diagrams. ``elaborate`` compiles a valid AST
into a composition expression: nodes are grouped into longest-path layers,
each layer becomes a parallel block flanked by generated wiring problems
that only copy and rearrange values (all arithmetic stays inside node
bindings), and loop edges are closed with a feedback trace around the whole
pipeline. ``evaluate`` resolves bindings from a registry and folds the
expression into a single :class:`~codp.dp.DesignProblem`;
``evaluate_kernel`` and ``evaluate_family`` do the same with parameter
boxes left open.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

from ..dp import DesignProblem, parallel_all, series, trace, union, intersection
from ..errors import DiagramTypeError, DomainMismatchError
from ..posets import Antichain, Discrete, NonNegReal, Poset, Product
from ..seeds import derive
from ..uncertainty.kernels import (DPSpace, FiniteSpace, MarkovKernel,
                                   ParameterizedDP, ProductSpace, Space,
                                   UNIT_SPACE)
from .ast import DiagramAST, EdgeDecl, NodeDecl, ParamDecl, QueryDecl

# ---------------------------------------------------------------------------
# Port descriptors

_DESC_RE = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\(([^()]*)\)\Z")


def split_desc(desc: str) -> tuple[str, tuple[str, ...]]:
    m = _DESC_RE.match(desc)
    if m is None:
        raise DiagramTypeError(f"malformed descriptor {desc!r}")
    kind, raw = m.group(1), m.group(2)
    args = tuple(a for a in raw.split(",") if a) if raw else ()
    return kind, args


def desc_to_poset(desc: str, registry: "Registry") -> Poset:
    kind, args = split_desc(desc)
    if kind == "real":
        if len(args) > 1:
            raise DiagramTypeError(f"real() takes at most one unit: {desc!r}")
        return NonNegReal(args[0] if args else "")
    if kind == "named":
        if len(args) != 1:
            raise DiagramTypeError(f"named() takes exactly one name: {desc!r}")
        poset = registry.posets.get(args[0])
        if poset is None:
            raise DiagramTypeError(f"unknown named poset {args[0]!r}")
        return poset
    if kind == "finite":
        if not args:
            raise DiagramTypeError(f"finite() needs at least one label: {desc!r}")
        return Discrete(args)
    raise DiagramTypeError(f"unknown descriptor kind {kind!r} in {desc!r}")


def desc_to_space(desc: str) -> Space:
    """Parameter-box domains; only finite label sets are supported."""
    kind, args = split_desc(desc)
    if kind != "finite":
        raise DiagramTypeError(
            f"parameter domains must be finite(...); got {desc!r}")
    if not args:
        raise DiagramTypeError(f"finite() needs at least one label: {desc!r}")
    return FiniteSpace(args)


# ---------------------------------------------------------------------------
# Structural validation

def validate(ast: DiagramAST) -> None:
    """Raise DiagramTypeError for structural or port-type problems."""
    for kw, e in [("edge", e) for e in ast.edges] + [("loop", e) for e in ast.loops]:
        src = ast.node(e.src_node)
        dst = ast.node(e.dst_node)
        if src is None:
            raise DiagramTypeError(f"{kw} references unknown node {e.src_node!r}",
                                   line=e.line)
        if dst is None:
            raise DiagramTypeError(f"{kw} references unknown node {e.dst_node!r}",
                                   line=e.line)
        sp = src.res_port(e.src_port)
        if sp is None:
            raise DiagramTypeError(
                f"{kw} source {e.src} is not a resource port", line=e.line)
        dpo = dst.fun_port(e.dst_port)
        if dpo is None:
            raise DiagramTypeError(
                f"{kw} target {e.dst} is not a functionality port", line=e.line)
        if sp.desc != dpo.desc:
            raise DiagramTypeError(
                f"{kw} {e.src} -> {e.dst} connects {sp.desc} to {dpo.desc}",
                line=e.line)

    incoming: dict[tuple[str, str], EdgeDecl] = {}
    for e in ast.all_edges():
        key = (e.dst_node, e.dst_port)
        if key in incoming:
            raise DiagramTypeError(
                f"port {e.dst} has more than one incoming connection",
                line=e.line)
        incoming[key] = e

    _layers(ast)  # raises on cycles

    boxed: dict[str, str] = {}
    for p in ast.params:
        desc_to_space(p.domain_desc)
        for t in p.targets:
            if ast.node(t) is None:
                raise DiagramTypeError(
                    f"param {p.name!r} targets unknown node {t!r}", line=p.line)
            if t in boxed:
                raise DiagramTypeError(
                    f"node {t!r} is targeted by params {boxed[t]!r} and {p.name!r}",
                    line=p.line)
            boxed[t] = p.name

    ext_fun = {(n.name, p.name) for n in ast.nodes for p in n.fun_ports
               if (n.name, p.name) not in incoming}
    for q in ast.queries:
        for ref, _ in q.assignments:
            node, _, port = ref.partition(".")
            if (node, port) not in ext_fun:
                raise DiagramTypeError(
                    f"query {q.name!r} fixes {ref!r}, which is not an external "
                    f"functionality port", line=q.line)


def _layers(ast: DiagramAST) -> list[list[NodeDecl]]:
    """Longest-path layering over the loop-free edge graph."""
    preds: dict[str, set[str]] = {n.name: set() for n in ast.nodes}
    succs: dict[str, set[str]] = {n.name: set() for n in ast.nodes}
    for e in ast.edges:
        if e.src_node != e.dst_node:
            preds[e.dst_node].add(e.src_node)
            succs[e.src_node].add(e.dst_node)
        else:
            raise DiagramTypeError(
                f"edge {e.src} -> {e.dst} forms a cycle; use a loop statement",
                line=e.line)
    depth: dict[str, int] = {}
    ready = sorted(n for n, ps in preds.items() if not ps)
    pending = {n: len(ps) for n, ps in preds.items()}
    order: list[str] = []
    while ready:
        n = ready.pop(0)
        order.append(n)
        depth[n] = max((depth[p] + 1 for p in preds[n]), default=0)
        for s in sorted(succs[n]):
            pending[s] -= 1
            if pending[s] == 0:
                ready.append(s)
        ready.sort()
    if len(order) != len(preds):
        cyclic = sorted(set(preds) - set(order))
        raise DiagramTypeError(
            "edges form a cycle through nodes: " + ", ".join(cyclic)
            + "; close feedback with a loop statement")
    out: dict[int, list[NodeDecl]] = {}
    for n in ast.nodes:  # ast.nodes is name-sorted
        out.setdefault(depth[n.name], []).append(n)
    return [out[d] for d in sorted(out)]


# ---------------------------------------------------------------------------
# Composition expressions

class Expr:
    """Base class for compiled composition expressions."""


@dataclass(frozen=True)
class ExprLeaf(Expr):
    node: str
    binding: str


@dataclass(frozen=True)
class ExprWire(Expr):
    """Pure rearrangement: copies input slots into an output shape.

    Shapes are nested tuples whose leaves are slot-id strings; a bare string
    is a scalar shape. Every output leaf must occur among the input leaves.
    """

    in_shape: Any
    out_shape: Any


@dataclass(frozen=True)
class ExprSeries(Expr):
    first: Expr
    second: Expr


@dataclass(frozen=True)
class ExprParallel(Expr):
    parts: tuple[Expr, ...]


@dataclass(frozen=True)
class ExprTrace(Expr):
    body: Expr


@dataclass(frozen=True)
class ExprUnion(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class ExprIntersection(Expr):
    left: Expr
    right: Expr


def describe(expr: Expr) -> str:
    """Compact single-line rendering of an expression tree."""
    if isinstance(expr, ExprLeaf):
        return f"leaf({expr.node})"
    if isinstance(expr, ExprWire):
        return "wire"
    if isinstance(expr, ExprSeries):
        return f"series({describe(expr.first)}, {describe(expr.second)})"
    if isinstance(expr, ExprParallel):
        return "parallel(" + ", ".join(describe(p) for p in expr.parts) + ")"
    if isinstance(expr, ExprTrace):
        return f"trace({describe(expr.body)})"
    if isinstance(expr, ExprUnion):
        return f"union({describe(expr.left)}, {describe(expr.right)})"
    if isinstance(expr, ExprIntersection):
        return f"intersection({describe(expr.left)}, {describe(expr.right)})"
    raise TypeError(f"not an expression: {expr!r}")


def _shape_leaves(shape: Any) -> list[str]:
    if isinstance(shape, str):
        return [shape]
    out: list[str] = []
    for s in shape:
        out.extend(_shape_leaves(s))
    return out


# ---------------------------------------------------------------------------
# Registry and elaboration result

@dataclass(frozen=True)
class Registry:
    """Name-to-object bindings used when evaluating a diagram."""

    problems: Mapping[str, DesignProblem] = field(default_factory=dict)
    posets: Mapping[str, Poset] = field(default_factory=dict)
    kernels: Mapping[str, MarkovKernel] = field(default_factory=dict)
    families: Mapping[str, ParameterizedDP] = field(default_factory=dict)


@dataclass(frozen=True)
class Elaboration:
    ast: DiagramAST
    expr: Expr
    ext_fun: tuple[tuple[str, str, str], ...]  # (node, port, desc)
    ext_res: tuple[tuple[str, str, str], ...]
    loop_edges: tuple[EdgeDecl, ...]
    slot_posets: Mapping[str, Poset]
    fun_poset: Poset
    res_poset: Poset

    def ext_fun_refs(self) -> tuple[str, ...]:
        return tuple(f"{n}.{p}" for n, p, _ in self.ext_fun)

    def ext_res_refs(self) -> tuple[str, ...]:
        return tuple(f"{n}.{p}" for n, p, _ in self.ext_res)


def _outer_poset(posets: list[Poset]) -> Poset:
    if len(posets) == 1:
        return posets[0]
    return Product(posets)


def _outer_shape(ids: list[str]) -> Any:
    if len(ids) == 1:
        return ids[0]
    return tuple(ids)


def elaborate(ast: DiagramAST, registry: Registry) -> Elaboration:
    """Compile a validated diagram into a composition expression."""
    validate(ast)
    layers = _layers(ast)

    incoming: dict[tuple[str, str], tuple[str, EdgeDecl]] = {}
    for e in ast.edges:
        incoming[(e.dst_node, e.dst_port)] = (f"res:{e.src}", e)
    for e in ast.loops:
        incoming[(e.dst_node, e.dst_port)] = (f"loop:{e.src}->{e.dst}", e)

    slot_posets: dict[str, Poset] = {}
    ext_fun: list[tuple[str, str, str]] = []
    for n in ast.nodes:
        for p in n.fun_ports:
            if (n.name, p.name) not in incoming:
                ext_fun.append((n.name, p.name, p.desc))
                slot_posets[f"fun:{n.name}.{p.name}"] = desc_to_poset(p.desc, registry)
        for p in n.res_ports:
            slot_posets[f"res:{n.name}.{p.name}"] = desc_to_poset(p.desc, registry)
    for e in ast.loops:
        src = ast.node(e.src_node).res_port(e.src_port)
        slot_posets[f"loop:{e.src}->{e.dst}"] = desc_to_poset(src.desc, registry)

    loop_src = {(e.src_node, e.src_port) for e in ast.loops}
    edge_src = {(e.src_node, e.src_port) for e in ast.edges}
    ext_res = [(n.name, p.name, p.desc) for n in ast.nodes for p in n.res_ports
               if (n.name, p.name) not in loop_src | edge_src]

    ext_fun_ids = [f"fun:{n}.{p}" for n, p, _ in ext_fun]
    ext_res_ids = [f"res:{n}.{p}" for n, p, _ in ext_res]
    loop_in_ids = [f"loop:{e.src}->{e.dst}" for e in ast.loops]
    loop_out_ids = [f"res:{e.src}" for e in ast.loops]

    def fun_source(n: NodeDecl, p) -> str:
        hit = incoming.get((n.name, p.name))
        return hit[0] if hit is not None else f"fun:{n.name}.{p.name}"

    # Slots still needed strictly after each layer (inputs of later layers
    # plus everything the final wire exports).
    final_ids = set(ext_res_ids) | set(loop_out_ids)
    needed_after: list[set[str]] = [set(final_ids) for _ in layers]
    for k in range(len(layers) - 2, -1, -1):
        needed_after[k] = set(needed_after[k + 1])
        for n in layers[k + 1]:
            needed_after[k].update(fun_source(n, p) for p in n.fun_ports)

    has_loops = bool(ast.loops)
    if has_loops:
        bus: Any = (tuple(ext_fun_ids), tuple(loop_in_ids))
    else:
        bus = tuple(ext_fun_ids)

    stages: list[Expr] = []

    def add_wire(in_shape: Any, out_shape: Any) -> None:
        if in_shape != out_shape:
            stages.append(ExprWire(in_shape, out_shape))

    for k, layer in enumerate(layers):
        fun_shapes = [tuple(fun_source(n, p) for p in n.fun_ports) for n in layer]
        res_shapes = [tuple(f"res:{n.name}.{p.name}" for p in n.res_ports)
                      for n in layer]
        # Passthrough keeps every already-present slot that later layers or
        # the final wire still consume.
        available = set(_shape_leaves(bus))
        passthrough = tuple(sorted(available & needed_after[k]))
        parts: list[Expr] = [ExprLeaf(n.name, n.binding) for n in layer]
        stage_in = tuple(fun_shapes)
        stage_out = tuple(res_shapes)
        if passthrough:
            parts.append(ExprWire(passthrough, passthrough))
            stage_in = stage_in + (passthrough,)
            stage_out = stage_out + (passthrough,)
        add_wire(bus, stage_in)
        stages.append(ExprParallel(tuple(parts)))
        bus = stage_out

    if has_loops:
        final_shape: Any = (tuple(ext_res_ids), tuple(loop_out_ids))
    else:
        final_shape = tuple(ext_res_ids)
    add_wire(bus, final_shape)

    if not stages:
        stages.append(ExprWire(bus, final_shape) if bus != final_shape
                      else ExprWire((), ()))
    core = stages[0]
    for s in stages[1:]:
        core = ExprSeries(core, s)
    if has_loops:
        core = ExprTrace(core)

    outer_fun_ids = ext_fun_ids
    outer_res_ids = ext_res_ids
    fun_poset = _outer_poset([slot_posets[i] for i in outer_fun_ids])
    res_poset = _outer_poset([slot_posets[i] for i in outer_res_ids])

    pre_in = _outer_shape(outer_fun_ids)
    pre_out: Any = tuple(outer_fun_ids)
    post_in: Any = tuple(outer_res_ids)
    post_out = _outer_shape(outer_res_ids)
    expr = core
    if pre_in != pre_out:
        expr = ExprSeries(ExprWire(pre_in, pre_out), expr)
    if post_in != post_out:
        expr = ExprSeries(expr, ExprWire(post_in, post_out))

    return Elaboration(ast=ast, expr=expr,
                       ext_fun=tuple(ext_fun), ext_res=tuple(ext_res),
                       loop_edges=ast.loops, slot_posets=dict(slot_posets),
                       fun_poset=fun_poset, res_poset=res_poset)


# ---------------------------------------------------------------------------
# Evaluation

def node_signature(node: NodeDecl, registry: Registry) -> tuple[Poset, Poset]:
    fun = Product([desc_to_poset(p.desc, registry) for p in node.fun_ports])
    res = Product([desc_to_poset(p.desc, registry) for p in node.res_ports])
    return fun, res


def _shape_poset(shape: Any, slot_posets: Mapping[str, Poset]) -> Poset:
    if isinstance(shape, str):
        return slot_posets[shape]
    return Product([_shape_poset(s, slot_posets) for s in shape])


def wire_dp(in_shape: Any, out_shape: Any,
            slot_posets: Mapping[str, Poset]) -> DesignProblem:
    """A rearrangement design problem: provides copies of consumed slots."""
    missing = set(_shape_leaves(out_shape)) - set(_shape_leaves(in_shape))
    if missing:
        raise DiagramTypeError(
            "wire output uses slots not present on its input: "
            + ", ".join(sorted(missing)))

    def bind(shape: Any, value: Any, env: dict) -> None:
        if isinstance(shape, str):
            env[shape] = value
        else:
            for s, v in zip(shape, value):
                bind(s, v, env)

    def build(shape: Any, env: dict) -> Any:
        if isinstance(shape, str):
            return env[shape]
        return tuple(build(s, env) for s in shape)

    res_poset = _shape_poset(out_shape, slot_posets)

    def query_fn(f: Any) -> Antichain:
        # Rearrangement of an already-validated tuple; no output check needed.
        env: dict = {}
        bind(in_shape, f, env)
        return Antichain._trusted(res_poset, (build(out_shape, env),))

    return DesignProblem(_shape_poset(in_shape, slot_posets), res_poset,
                         query_fn, name="wire")


def _resolve_node_dp(elab: Elaboration, registry: Registry, node_name: str,
                     overrides: Mapping[str, DesignProblem] | None) -> DesignProblem:
    node = elab.ast.node(node_name)
    if overrides is not None and node_name in overrides:
        dp = overrides[node_name]
    else:
        dp = registry.problems.get(node.binding)
        if dp is None:
            raise DiagramTypeError(
                f"node {node_name!r}: no design problem bound to "
                f"{node.binding!r}")
    want_fun, want_res = node_signature(node, registry)
    if dp.fun_poset != want_fun or dp.res_poset != want_res:
        raise DiagramTypeError(
            f"node {node_name!r}: binding carriers {dp.fun_poset} -> "
            f"{dp.res_poset} do not match ports {want_fun} -> {want_res}")
    return dp


def evaluate(elab: Elaboration, registry: Registry, *,
             node_overrides: Mapping[str, DesignProblem] | None = None,
             trace_kwargs: Mapping[str, Any] | None = None) -> DesignProblem:
    """Fold the composition expression into one design problem.

    Parameter boxes are ignored here: every node uses its own binding (or an
    entry of ``node_overrides``). Use ``evaluate_kernel`` to sample boxed
    nodes instead.
    """
    tk = dict(trace_kwargs or {})

    def walk(expr: Expr) -> DesignProblem:
        if isinstance(expr, ExprLeaf):
            return _resolve_node_dp(elab, registry, expr.node, node_overrides)
        if isinstance(expr, ExprWire):
            return wire_dp(expr.in_shape, expr.out_shape, elab.slot_posets)
        if isinstance(expr, ExprSeries):
            return series(walk(expr.first), walk(expr.second))
        if isinstance(expr, ExprParallel):
            return parallel_all([walk(p) for p in expr.parts])
        if isinstance(expr, ExprTrace):
            return trace(walk(expr.body), **tk)
        if isinstance(expr, ExprUnion):
            return union(walk(expr.left), walk(expr.right))
        if isinstance(expr, ExprIntersection):
            return intersection(walk(expr.left), walk(expr.right))
        raise TypeError(f"not an expression: {expr!r}")

    return walk(elab.expr)


def _param_domain(elab: Elaboration) -> Space:
    spaces = [desc_to_space(p.domain_desc) for p in elab.ast.params]
    if not spaces:
        return UNIT_SPACE
    if len(spaces) == 1:
        return spaces[0]
    return ProductSpace(spaces)


def _param_values(elab: Elaboration, param: Any) -> list[Any]:
    boxes = elab.ast.params
    if not boxes:
        return []
    if len(boxes) == 1:
        return [param]
    return list(param)


def evaluate_kernel(elab: Elaboration, registry: Registry, *,
                    trace_kwargs: Mapping[str, Any] | None = None,
                    name: str = "diagram") -> MarkovKernel:
    """Leave parameter boxes open: a kernel from box values to solved DPs.

    Each box is drawn once per composite draw (child seed = box index in
    canonical order) and its value feeds all of its target nodes; ``fn``
    boxes build deterministically.
    """
    domain = _param_domain(elab)
    codomain = DPSpace(elab.fun_poset, elab.res_poset)

    def draw_fn(param: Any, seed: int) -> DesignProblem:
        values = _param_values(elab, param)
        overrides: dict[str, DesignProblem] = {}
        for i, (box, value) in enumerate(zip(elab.ast.params, values)):
            if box.kind == "kernel":
                kernel = registry.kernels.get(box.binding)
                if kernel is None:
                    raise DiagramTypeError(
                        f"param {box.name!r}: no kernel bound to {box.binding!r}")
                node_dp = kernel.draw(value, derive(seed, i))
            else:
                family = registry.families.get(box.binding)
                if family is None:
                    raise DiagramTypeError(
                        f"param {box.name!r}: no family bound to {box.binding!r}")
                node_dp = family.build(value)
            for target in box.targets:
                overrides[target] = node_dp
        return evaluate(elab, registry, node_overrides=overrides,
                        trace_kwargs=trace_kwargs)

    return MarkovKernel(domain, codomain, draw_fn, name=name)


def evaluate_family(elab: Elaboration, registry: Registry, *,
                    trace_kwargs: Mapping[str, Any] | None = None,
                    name: str = "diagram") -> ParameterizedDP:
    """All-deterministic variant: every box must be ``fn``-kind."""
    for box in elab.ast.params:
        if box.kind != "fn":
            raise DiagramTypeError(
                f"param {box.name!r} is kernel-kind; a deterministic family "
                f"needs fn-kind boxes only")
    domain = _param_domain(elab)

    def build_fn(param: Any) -> DesignProblem:
        values = _param_values(elab, param)
        overrides: dict[str, DesignProblem] = {}
        for box, value in zip(elab.ast.params, values):
            family = registry.families.get(box.binding)
            if family is None:
                raise DiagramTypeError(
                    f"param {box.name!r}: no family bound to {box.binding!r}")
            node_dp = family.build(value)
            for target in box.targets:
                overrides[target] = node_dp
        return evaluate(elab, registry, node_overrides=overrides,
                        trace_kwargs=trace_kwargs)

    return ParameterizedDP(domain, elab.fun_poset, elab.res_poset, build_fn,
                           name=name)


def query_functionality(elab: Elaboration, query: QueryDecl) -> Any:
    """Assemble the composite functionality value a query pins down."""
    values = dict(query.assignments)
    missing = [ref for ref in elab.ext_fun_refs() if ref not in values]
    if missing:
        raise DiagramTypeError(
            f"query {query.name!r} leaves ports unassigned: "
            + ", ".join(missing))
    out: list[Any] = []
    for (node, port, _desc), ref in zip(elab.ext_fun, elab.ext_fun_refs()):
        poset = elab.slot_posets[f"fun:{node}.{port}"]
        value = values[ref]
        try:
            poset.require_element(value)
        except (ValueError, DomainMismatchError) as exc:
            raise DiagramTypeError(
                f"query {query.name!r}: port {ref}: {exc}") from None
        out.append(value)
    if len(out) == 1:
        return out[0]
    return tuple(out)
