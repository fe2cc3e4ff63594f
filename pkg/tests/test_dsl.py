"""Diagram language tests: parsing, canonical formatting, validation,
elaboration, and evaluation against the brute-force oracle."""

from __future__ import annotations

import json
import random

import pytest

from codp.diagram.ast import DiagramAST, QueryDecl, ast_to_json
from codp.diagram.elaborate import (
    Registry,
    desc_to_poset,
    desc_to_space,
    describe,
    elaborate,
    evaluate,
    evaluate_family,
    evaluate_kernel,
    node_signature,
    query_functionality,
    split_desc,
    validate,
    wire_dp,
)
from codp.diagram.formatter import format_diagram
from codp.diagram.parser import parse_diagram
from codp.dp import DesignProblem
from codp.errors import DiagramSyntaxError, DiagramTypeError
from codp.posets import Antichain, Discrete, NonNegReal, Product
from codp.uncertainty.kernels import DPSpace, FiniteSpace, ParameterizedDP

from oracles import diagram_feasible_set, feasible_set, random_relation_dp

GRAMS = NonNegReal("g")
USD = NonNegReal("$")

# Pointed 3-chain used as the named loop carrier in finite_loop.codp.
LEVEL = Discrete(("l0", "l1", "l2"), [("l0", "l1"), ("l1", "l2")])

VALID_FIXTURES = [
    "finite_chain.codp",
    "finite_parallel.codp",
    "finite_diamond.codp",
    "finite_loop.codp",
    "params_fn.codp",
]


def _read(fixtures_dir, name):
    if name == "uav.codp":
        from conftest import DIAGRAMS

        return (DIAGRAMS / name).read_text()
    return (fixtures_dir / name).read_text()


def _typecheck(ast: DiagramAST, registry: Registry) -> None:
    # What `check` does after parsing: structural validation, then make sure
    # every port descriptor names a poset the registry can produce.
    validate(ast)
    for n in ast.nodes:
        for p in n.fun_ports + n.res_ports:
            desc_to_poset(p.desc, registry)


# ---------------------------------------------------------------------------
# Parsing and canonical order


def test_uav_parse_counts_and_canonical_order(uav_diagram_path):
    ast = parse_diagram(uav_diagram_path.read_text())
    assert [n.name for n in ast.nodes] == [
        "actuation", "battery", "chassis", "perception", "task"]
    assert len(ast.edges) == 10
    assert len(ast.loops) == 1
    assert [p.name for p in ast.params] == ["actuator_set", "battery_tech"]
    assert [q.name for q in ast.queries] == ["default", "light"]
    assert len(ast.all_edges()) == 11

    keys = [(e.src_node, e.src_port, e.dst_node, e.dst_port) for e in ast.edges]
    assert keys == sorted(keys)

    task = ast.node("task")
    assert task is not None
    assert [p.name for p in task.fun_ports] == ["missions", "distance", "frequency"]
    assert task.fun_port("distance").desc == "real(m)"
    assert task.fun_port("nope") is None
    assert task.res_port("velocity").desc == "real(m/s)"
    assert ast.node("ghost") is None

    loop = ast.loops[0]
    assert loop.src == "chassis.total_mass"
    assert loop.dst == "actuation.total_mass"


def test_statement_order_is_irrelevant(uav_diagram_path):
    text = uav_diagram_path.read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    shuffled = "\n".join(reversed(lines)) + "\n"
    assert parse_diagram(shuffled) == parse_diagram(text)


def test_comments_and_blank_lines_are_ignored(fixtures_dir):
    text = _read(fixtures_dir, "finite_chain.codp")
    ast = parse_diagram(text)
    # The canonical rendering has no comments; both parse to the same AST.
    assert parse_diagram(format_diagram(ast)) == ast


@pytest.mark.parametrize("name", VALID_FIXTURES + ["uav.codp"])
def test_round_trip_and_idempotent_formatting(fixtures_dir, name):
    text = _read(fixtures_dir, name)
    ast = parse_diagram(text)
    rendered = format_diagram(ast)
    again = parse_diagram(rendered)
    assert again == ast
    assert format_diagram(again) == rendered


def test_golden_file_is_canonical(fixtures_dir):
    golden = (fixtures_dir / "golden" / "uav_canonical.codp").read_text()
    assert format_diagram(parse_diagram(golden)) == golden


def test_format_empty_diagram():
    assert format_diagram(DiagramAST((), (), (), (), ())) == ""


# ---------------------------------------------------------------------------
# Malformed inputs


def _malformed(fixtures_dir, prefix):
    files = sorted((fixtures_dir / "malformed").glob(prefix + "*.codp"))
    assert files, "malformed fixture set went missing"
    return files


def test_syntax_errors_carry_position(fixtures_dir):
    for path in _malformed(fixtures_dir, "syntax_"):
        with pytest.raises(DiagramSyntaxError) as exc_info:
            parse_diagram(path.read_text())
        err = exc_info.value
        assert err.line >= 1, path.name
        assert err.col >= 1, path.name
        assert str(err).startswith(f"line {err.line}, col {err.col}: "), path.name


def test_type_errors_parse_but_fail_checking(fixtures_dir):
    for path in _malformed(fixtures_dir, "type_"):
        ast = parse_diagram(path.read_text())  # syntactically fine
        with pytest.raises(DiagramTypeError):
            _typecheck(ast, Registry())


def test_valid_fixtures_pass_checking(fixtures_dir):
    for name in ("finite_chain.codp", "finite_parallel.codp",
                 "finite_diamond.codp", "params_fn.codp"):
        _typecheck(parse_diagram(_read(fixtures_dir, name)), Registry())


def test_named_poset_requires_registry_entry(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "finite_loop.codp"))
    with pytest.raises(DiagramTypeError):
        _typecheck(ast, Registry())
    _typecheck(ast, Registry(posets={"level": LEVEL}))


# ---------------------------------------------------------------------------
# Descriptors


def test_split_desc_forms():
    assert split_desc("real(m/s)") == ("real", ("m/s",))
    assert split_desc("real()") == ("real", ())
    assert split_desc("finite(a,b,c)") == ("finite", ("a", "b", "c"))
    assert split_desc("named(level)") == ("named", ("level",))
    with pytest.raises(DiagramTypeError):
        split_desc("just words")


def test_desc_to_poset_mapping():
    reg = Registry(posets={"level": LEVEL})
    assert desc_to_poset("real(g)", reg) == GRAMS
    assert desc_to_poset("real()", reg) == NonNegReal("")
    assert desc_to_poset("finite(b,a)", reg) == Discrete(("a", "b"))
    assert desc_to_poset("named(level)", reg) is LEVEL
    with pytest.raises(DiagramTypeError):
        desc_to_poset("named(missing)", reg)
    with pytest.raises(DiagramTypeError):
        desc_to_poset("real(m,s)", reg)
    with pytest.raises(DiagramTypeError):
        desc_to_poset("tensor(3)", reg)
    with pytest.raises(DiagramTypeError):
        desc_to_poset("finite()", reg)


def test_desc_to_space_mapping():
    assert desc_to_space("finite(x,y)") == FiniteSpace(("x", "y"))
    with pytest.raises(DiagramTypeError):
        desc_to_space("real(g)")
    with pytest.raises(DiagramTypeError):
        desc_to_space("named(level)")


# ---------------------------------------------------------------------------
# Elaboration structure


def test_node_signature_keeps_declared_port_order(uav_diagram_path):
    ast = parse_diagram(uav_diagram_path.read_text())
    fun, res = node_signature(ast.node("actuation"), Registry())
    assert fun == Product([NonNegReal("m/s"), GRAMS])
    assert res == Product([NonNegReal("W"), GRAMS, USD])


def test_wire_dp_rearranges_slots():
    slots = {"a": GRAMS, "b": USD}
    wire = wire_dp(("a", "b"), ("b", ("a", "a")), slots)
    assert wire.fun_poset == Product([GRAMS, USD])
    assert wire.res_poset == Product([USD, Product([GRAMS, GRAMS])])
    front = wire.query((1.5, 2.5))
    assert set(front) == {(2.5, (1.5, 1.5))}

    with pytest.raises(DiagramTypeError):
        wire_dp(("a",), ("b",), slots)


def test_chain_externals_and_expression_shape(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "finite_chain.codp"))
    elab = elaborate(ast, Registry())
    assert elab.ext_fun_refs() == ("stage1.demand",)
    assert elab.ext_res_refs() == ("stage2.audit", "stage3.final")
    assert elab.fun_poset == Discrete(("f0", "f1"))
    assert elab.res_poset == Product(
        [Discrete(("w0", "w1")), Discrete(("r0", "r1"))])
    assert elab.loop_edges == ()

    text = describe(elab.expr)
    assert "leaf(stage1)" in text
    assert "series(" in text
    assert "parallel(" in text
    assert "trace(" not in text


def test_loop_externals_and_expression_shape(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "finite_loop.codp"))
    reg = Registry(posets={"level": LEVEL})
    elab = elaborate(ast, reg)
    assert elab.ext_fun_refs() == ("plant.setting",)
    assert elab.ext_res_refs() == ("plant.yield",)
    assert elab.fun_poset == Discrete(("s0", "s1"))
    assert elab.res_poset == Discrete(("g0", "g1"))
    assert len(elab.loop_edges) == 1
    assert "trace(" in describe(elab.expr)


# ---------------------------------------------------------------------------
# Evaluation soundness against the brute-force oracle


def _soundness_rounds(fixtures_dir, name, seed, rounds, posets=None):
    ast = parse_diagram(_read(fixtures_dir, name))
    poset_map = dict(posets or {})
    base = Registry(posets=poset_map)
    rng = random.Random(seed)
    for _ in range(rounds):
        node_dps = {}
        problems = {}
        for n in ast.nodes:
            fun, res = node_signature(n, base)
            dp = random_relation_dp(rng, fun, res, name=n.name)
            node_dps[n.name] = dp
            problems[n.binding] = dp
        registry = Registry(problems=problems, posets=poset_map)
        elab = elaborate(ast, registry)
        got = feasible_set(evaluate(elab, registry))
        want = diagram_feasible_set(ast, node_dps, registry)
        assert got == want


def test_chain_evaluation_matches_oracle(fixtures_dir):
    _soundness_rounds(fixtures_dir, "finite_chain.codp", 9001, 15)


def test_parallel_evaluation_matches_oracle(fixtures_dir):
    _soundness_rounds(fixtures_dir, "finite_parallel.codp", 9002, 15)


def test_diamond_evaluation_matches_oracle(fixtures_dir):
    _soundness_rounds(fixtures_dir, "finite_diamond.codp", 9003, 12)


def test_loop_evaluation_matches_oracle(fixtures_dir):
    _soundness_rounds(fixtures_dir, "finite_loop.codp", 9004, 15,
                      posets={"level": LEVEL})


def test_missing_binding_raises(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "finite_parallel.codp"))
    elab = elaborate(ast, Registry())
    with pytest.raises(DiagramTypeError):
        evaluate(elab, Registry())


def test_binding_with_wrong_carriers_raises(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "finite_parallel.codp"))
    base = Registry()
    problems = {}
    for n in ast.nodes:
        fun, res = node_signature(n, base)
        # Scalar carriers instead of the expected one-port products.
        bad = DesignProblem(
            fun.components[0], res.components[0],
            lambda f, _res=res.components[0]: Antichain(_res, (_res.bottom(),)),
            name="bad")
        problems[n.binding] = bad
    registry = Registry(problems=problems)
    elab = elaborate(ast, registry)
    with pytest.raises(DiagramTypeError):
        evaluate(elab, registry)


# ---------------------------------------------------------------------------
# Parameter boxes


KNOB = Product([Discrete(("k0", "k1"))])
POWER = Product([Discrete(("p0", "p1"))])


def _gain_family():
    def build(mode):
        def q(f):
            need = "p1" if (mode == "high" or f[0] == "k1") else "p0"
            return Antichain(POWER, ((need,),))
        return DesignProblem(KNOB, POWER, q, name=f"gain[{mode}]")

    return ParameterizedDP(FiniteSpace(("low", "high")), KNOB, POWER, build,
                           name="gain_family")


def test_evaluate_family_builds_per_mode(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "params_fn.codp"))
    registry = Registry(families={"gain_family": _gain_family()})
    elab = elaborate(ast, registry)
    assert elab.fun_poset == Discrete(("k0", "k1"))
    assert elab.res_poset == Discrete(("p0", "p1"))

    fam = evaluate_family(elab, registry)
    assert fam.domain == FiniteSpace(("low", "high"))
    low = fam.build("low")
    assert set(low.query("k0")) == {"p0"}
    assert set(low.query("k1")) == {"p1"}
    high = fam.build("high")
    assert set(high.query("k0")) == {"p1"}


def test_evaluate_kernel_draws_fn_boxes_deterministically(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "params_fn.codp"))
    registry = Registry(families={"gain_family": _gain_family()})
    elab = elaborate(ast, registry)
    kern = evaluate_kernel(elab, registry)
    assert kern.domain == FiniteSpace(("low", "high"))
    assert kern.codomain == DPSpace(elab.fun_poset, elab.res_poset)
    drawn = kern.draw("high", 7)
    assert set(drawn.query("k0")) == {"p1"}
    assert feasible_set(kern.draw("low", 0)) == feasible_set(kern.draw("low", 99))


def test_evaluate_kernel_without_binding_fails_at_draw(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "params_fn.codp"))
    elab = elaborate(ast, Registry())
    kern = evaluate_kernel(elab, Registry())
    with pytest.raises(DiagramTypeError):
        kern.draw("low", 0)


def test_evaluate_family_rejects_kernel_boxes(uav_diagram_path):
    ast = parse_diagram(uav_diagram_path.read_text())
    elab = elaborate(ast, Registry())
    with pytest.raises(DiagramTypeError):
        evaluate_family(elab, Registry())


# ---------------------------------------------------------------------------
# Queries


def test_query_functionality_orders_by_external_ports(uav_diagram_path):
    ast = parse_diagram(uav_diagram_path.read_text())
    elab = elaborate(ast, Registry())
    assert elab.ext_fun_refs() == (
        "chassis.payload", "task.missions", "task.distance", "task.frequency")
    assert elab.ext_res_refs() == (
        "chassis.self_weight", "chassis.lifetime_cost")

    default = ast.queries[0]
    assert default.name == "default"
    assert query_functionality(elab, default) == (1300.0, 2000.0, 600.0, 0.004)
    light = ast.queries[1]
    assert query_functionality(elab, light) == (500.0, 2000.0, 600.0, 0.004)


def test_query_functionality_scalar_for_single_port(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "params_fn.codp"))
    elab = elaborate(ast, Registry())
    assert query_functionality(elab, ast.queries[0]) == "k0"


def test_query_functionality_rejects_gaps_and_bad_values(uav_diagram_path):
    ast = parse_diagram(uav_diagram_path.read_text())
    elab = elaborate(ast, Registry())

    partial = QueryDecl("partial", (("chassis.payload", 1300.0),), 1)
    with pytest.raises(DiagramTypeError):
        query_functionality(elab, partial)

    bad = QueryDecl("bad", (
        ("chassis.payload", -4.0),
        ("task.missions", 2000.0),
        ("task.distance", 600.0),
        ("task.frequency", 0.004),
    ), 1)
    with pytest.raises(DiagramTypeError):
        query_functionality(elab, bad)


# ---------------------------------------------------------------------------
# JSON export


def test_ast_to_json_shape(fixtures_dir):
    ast = parse_diagram(_read(fixtures_dir, "finite_chain.codp"))
    doc = ast_to_json(ast)
    assert sorted(doc) == ["edges", "loops", "nodes", "params", "queries"]
    assert doc["nodes"][0] == {
        "name": "stage1", "bind": "box_s1",
        "fun": [{"name": "demand", "desc": "finite(f0,f1)"}],
        "res": [{"name": "mid", "desc": "finite(m0,m1)"}],
    }
    assert doc["edges"] == [
        {"src": "stage1.mid", "dst": "stage2.mid"},
        {"src": "stage2.feed", "dst": "stage3.inp"},
    ]
    assert doc["loops"] == [] and doc["params"] == []
    json.dumps(doc)  # plain data, serializable as-is


def test_ast_to_json_params_and_queries(uav_diagram_path):
    doc = ast_to_json(parse_diagram(uav_diagram_path.read_text()))
    assert doc["params"][0] == {
        "name": "actuator_set", "domain": "finite(catalog)", "kind": "kernel",
        "bind": "uav_actuation_kernel", "targets": ["actuation"]}
    q = doc["queries"][0]
    assert q["name"] == "default"
    assert {"port": "chassis.payload", "value": 1300.0} in q["assignments"]
    assert doc["loops"] == [
        {"src": "chassis.total_mass", "dst": "actuation.total_mass"}]
