"""Poset carriers, antichains, and their JSON encodings."""

import random

import pytest

from codp.errors import (DomainMismatchError, InfinitePosetError,
                         PosetMismatchError, UnsupportedPosetError)
from codp.posets import (TOP, Antichain, Discrete, NonNegReal, Opposite,
                         Product, canonical_key, enumerate_elements, minimals,
                         upper_intersection, upper_union)
from codp.serialization import (antichain_from_json, antichain_to_json,
                                element_from_json, element_to_json,
                                poset_from_json, poset_to_json)

from oracles import random_poset

GRAMS = NonNegReal("g")
USD = NonNegReal("usd")


def test_nonnegreal_order_and_lattice():
    p = NonNegReal("W")
    assert p.leq(0.0, 3.5)
    assert p.leq(3.5, 3.5)
    assert not p.leq(4.0, 3.5)
    assert p.leq(1e18, TOP)
    assert p.bottom() == 0.0
    assert p.top() == TOP
    assert p.join(2.0, 5.0) == 5.0
    assert p.meet(2.0, 5.0) == 2.0
    # total order: the join is the single minimal upper bound
    assert p.minimal_upper_bounds(2.0, 5.0) == (5.0,)


def test_nonnegreal_membership():
    assert GRAMS.contains(0)
    assert GRAMS.contains(2.5)
    assert GRAMS.contains(TOP)
    assert not GRAMS.contains(-1.0)
    assert not GRAMS.contains("3")
    assert not GRAMS.contains(True)
    with pytest.raises(DomainMismatchError):
        GRAMS.require_element(-2.0)


def test_unit_tags_distinguish_carriers():
    assert NonNegReal("g") == NonNegReal("g")
    assert NonNegReal("g") != NonNegReal("W")
    assert Discrete(("a",), unit="x") != Discrete(("a",), unit="y")


def test_canonical_key_total_order_over_mixed_tuples():
    vals = [(2.0, "b"), (1.0, "z"), (2.0, "a")]
    assert sorted(vals, key=canonical_key) == [
        (1.0, "z"), (2.0, "a"), (2.0, "b")]
    with pytest.raises(DomainMismatchError):
        canonical_key(True)
    with pytest.raises(DomainMismatchError):
        canonical_key([1, 2])


def test_discrete_closure_is_reflexive_and_transitive():
    p = Discrete(("a", "b", "c"), [("a", "b"), ("b", "c")])
    assert p.leq("a", "c")
    assert p.leq("b", "b")
    assert not p.leq("c", "a")
    assert not p.contains("d")


def test_discrete_rejects_cycles_and_unknown_labels():
    with pytest.raises(ValueError):
        Discrete(("a", "b"), [("a", "b"), ("b", "a")])
    with pytest.raises(ValueError):
        Discrete(("a", "b", "c"), [("a", "b"), ("b", "c"), ("c", "a")])
    with pytest.raises(ValueError):
        Discrete(("a",), [("a", "zzz")])


def test_discrete_bottom_and_top_require_uniqueness():
    chain = Discrete(("lo", "mid", "hi"), [("lo", "mid"), ("mid", "hi")])
    assert chain.bottom() == "lo"
    assert chain.top() == "hi"
    vee = Discrete(("a", "b", "t"), [("a", "t"), ("b", "t")])
    assert vee.top() == "t"
    with pytest.raises(UnsupportedPosetError):
        vee.bottom()
    with pytest.raises(UnsupportedPosetError):
        Discrete(("a", "b")).join("a", "b")


def test_product_componentwise_order():
    p = Product([GRAMS, USD])
    assert p.leq((1.0, 2.0), (1.0, 3.0))
    assert not p.leq((1.0, 4.0), (2.0, 3.0))
    assert p.contains((0.0, 0.0))
    assert not p.contains((0.0,))
    assert not p.contains([0.0, 0.0])
    assert p.bottom() == (0.0, 0.0)
    assert p.join((1.0, 5.0), (2.0, 3.0)) == (2.0, 5.0)
    assert p.meet((1.0, 5.0), (2.0, 3.0)) == (1.0, 3.0)


def test_product_minimal_upper_bounds_multiply_across_components():
    m = Discrete(("a", "b", "t1", "t2"),
                 [("a", "t1"), ("a", "t2"), ("b", "t1"), ("b", "t2")])
    assert set(m.minimal_upper_bounds("a", "b")) == {"t1", "t2"}
    p = Product([m, m])
    got = set(p.minimal_upper_bounds(("a", "a"), ("b", "b")))
    assert got == {("t1", "t1"), ("t1", "t2"), ("t2", "t1"), ("t2", "t2")}


def test_empty_product_is_the_one_point_poset():
    unit = Product([])
    assert unit.contains(())
    assert unit.bottom() == ()
    assert unit.leq((), ())
    assert enumerate_elements(unit) == [()]


def test_opposite_reverses_the_order():
    p = Opposite(GRAMS)
    assert p.leq(5.0, 2.0)
    assert not p.leq(2.0, 5.0)
    assert p.bottom() == TOP
    assert p.top() == 0.0
    assert p.join(2.0, 5.0) == 2.0
    assert p.meet(2.0, 5.0) == 5.0
    assert Opposite(Opposite(GRAMS)).leq(2.0, 5.0)


def test_antichain_validates_membership_and_incomparability():
    with pytest.raises(DomainMismatchError):
        Antichain(GRAMS, [-1.0])
    with pytest.raises(ValueError):
        Antichain(GRAMS, [1.0, 2.0])  # comparable on a total order
    ac = Antichain(GRAMS, [3.0])
    assert ac.contains(3.0)
    assert ac.contains(10.0)
    assert not ac.contains(2.9)
    with pytest.raises(DomainMismatchError):
        ac.contains(-5.0)


def test_antichain_iteration_is_sorted_and_sized():
    p = Product([GRAMS, USD])
    ac = Antichain(p, [(2.0, 5.0), (1.0, 9.0), (3.0, 1.0)])
    assert list(ac) == [(1.0, 9.0), (2.0, 5.0), (3.0, 1.0)]
    assert len(ac) == 3
    assert bool(ac)
    empty = Antichain(p, [])
    assert not empty
    assert not empty.contains((0.0, 0.0))


def test_minimals_drops_dominated_and_duplicate_points():
    p = Product([GRAMS, USD])
    ac = minimals(p, [(1.0, 1.0), (2.0, 2.0), (1.0, 1.0), (0.5, 3.0)])
    assert ac.elements == frozenset({(1.0, 1.0), (0.5, 3.0)})
    with pytest.raises(DomainMismatchError):
        minimals(p, [(1.0, -1.0)])


def _upper_set(poset, ac):
    return {x for x in enumerate_elements(poset) if ac.contains(x)}


def test_upper_union_and_intersection_match_set_semantics():
    # 120 random posets; the antichain ops must agree with plain set algebra
    # on the upper sets they represent.
    rng = random.Random(1807)
    for _ in range(120):
        poset = random_poset(rng)
        elems = enumerate_elements(poset)
        sub_a = [x for x in elems if rng.random() < 0.5]
        sub_b = [x for x in elems if rng.random() < 0.5]
        a = minimals(poset, sub_a)
        b = minimals(poset, sub_b)
        up_a = {x for x in elems if any(poset.leq(m, x) for m in sub_a)}
        assert _upper_set(poset, a) == up_a
        ua, ub = _upper_set(poset, a), _upper_set(poset, b)
        assert _upper_set(poset, upper_union(a, b)) == ua | ub
        assert _upper_set(poset, upper_intersection(a, b)) == ua & ub


def test_upper_ops_reject_mismatched_posets():
    a = Antichain(GRAMS, [1.0])
    b = Antichain(USD, [1.0])
    with pytest.raises(PosetMismatchError):
        upper_union(a, b)
    with pytest.raises(PosetMismatchError):
        upper_intersection(a, b)


def test_enumerate_elements_is_canonical_and_finite_only():
    chain = Discrete(("b", "a"), [("a", "b")])
    assert enumerate_elements(chain) == ["a", "b"]
    assert len(enumerate_elements(Product([chain, chain]))) == 4
    with pytest.raises(InfinitePosetError):
        enumerate_elements(GRAMS)
    with pytest.raises(InfinitePosetError):
        Product([GRAMS]).iter_elements()


@pytest.mark.parametrize("poset", [
    NonNegReal(),
    NonNegReal("g"),
    Discrete(("x", "y", "z"), [("x", "y")], unit="mode"),
    Product([NonNegReal("g"), Discrete(("a", "b"), [("a", "b")])]),
    Opposite(NonNegReal("usd")),
    Product([]),
])
def test_poset_json_round_trip(poset):
    assert poset_from_json(poset_to_json(poset)) == poset


def test_element_json_round_trip_handles_top():
    assert element_to_json(GRAMS, TOP) == "top"
    assert element_from_json(GRAMS, "top") == TOP
    assert element_from_json(GRAMS, 2.5) == 2.5
    p = Product([GRAMS, Discrete(("a",))])
    elem = (TOP, "a")
    assert element_from_json(p, element_to_json(p, elem)) == elem
    with pytest.raises(DomainMismatchError):
        element_from_json(p, [1.0])


def test_antichain_json_round_trip():
    p = Product([GRAMS, USD])
    ac = Antichain(p, [(1.0, 9.0), (2.0, 5.0)])
    back = antichain_from_json(antichain_to_json(ac))
    assert back.poset == p
    assert back.elements == ac.elements
    # without the embedded poset the carrier must be supplied
    slim = antichain_to_json(ac, include_poset=False)
    assert "poset" not in slim
    assert antichain_from_json(slim, p).elements == ac.elements
