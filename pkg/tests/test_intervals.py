"""Interval brackets of imperfectly known design problems."""

import random

import pytest

from codp.dp import (ImplementationSet, dp_from_mdpi, identity_dp,
                     intersection, map_dp, parallel, series, union)
from codp.errors import PosetMismatchError, TraceDivergenceError
from codp.posets import Discrete, NonNegReal, Product, enumerate_elements
from codp.uncertainty.intervals import (IntervalDP, check_containment,
                                        embed_dp, interval_lift,
                                        interval_trace)

from oracles import (feasible_set, oracle_intersection, oracle_parallel,
                     oracle_series, oracle_trace, oracle_union,
                     random_pointed_poset, random_poset, random_relation_dp)


def random_interval(rng, fun_poset, res_poset):
    """Pessimistic endpoint plus a strictly more permissive optimistic one."""
    lower = random_relation_dp(rng, fun_poset, res_poset, name="pess")
    extra = random_relation_dp(rng, fun_poset, res_poset, name="extra")
    return IntervalDP(lower, union(lower, extra, name="opt"))


def test_interval_requires_shared_carriers():
    with pytest.raises(PosetMismatchError):
        IntervalDP(identity_dp(NonNegReal("g")),
                   identity_dp(NonNegReal("W")))


def test_embedding_is_a_degenerate_bracket():
    rng = random.Random(7)
    dp = random_relation_dp(rng, random_poset(rng), random_poset(rng))
    idp = embed_dp(dp)
    assert idp.lower is dp
    assert idp.upper is dp
    assert check_containment(idp, enumerate_elements(dp.fun_poset))


def test_check_containment_detects_a_broken_bracket():
    f_one = Discrete(("f",))
    chain = Discrete(("r0", "r1"), [("r0", "r1")])
    permissive = dp_from_mdpi(ImplementationSet(f_one, chain,
                                                [("x", "f", "r0")]))
    barren = dp_from_mdpi(ImplementationSet(f_one, chain, []))
    # the constructor only checks carriers; the semantic bracket is the
    # probe's job to reject
    backwards = IntervalDP(permissive, barren)
    assert not check_containment(backwards, ["f"])


def test_series_and_parallel_lifts_are_endpoint_wise_and_contained():
    rng = random.Random(1201)
    for _ in range(40):
        pa, pb, pc = (random_poset(rng, 4) for _ in range(3))
        ia = random_interval(rng, pa, pb)
        ib = random_interval(rng, pb, pc)
        chained = interval_lift(series, ia, ib)
        assert feasible_set(chained.lower) == oracle_series(
            feasible_set(ia.lower), feasible_set(ib.lower))
        assert feasible_set(chained.upper) == oracle_series(
            feasible_set(ia.upper), feasible_set(ib.upper))
        assert check_containment(chained, enumerate_elements(pa))

        ic = random_interval(rng, pa, pb)
        side = interval_lift(parallel, ia, ic)
        assert feasible_set(side.lower) == oracle_parallel(
            feasible_set(ia.lower), feasible_set(ic.lower))
        assert feasible_set(side.upper) == oracle_parallel(
            feasible_set(ia.upper), feasible_set(ic.upper))
        assert check_containment(side,
                                 enumerate_elements(Product([pa, pa])))


def test_union_and_intersection_lifts_are_endpoint_wise_and_contained():
    rng = random.Random(1301)
    for _ in range(40):
        pf, pr = random_poset(rng, 4), random_poset(rng, 4)
        ia = random_interval(rng, pf, pr)
        ib = random_interval(rng, pf, pr)
        for op, oracle in ((union, oracle_union),
                           (intersection, oracle_intersection)):
            got = interval_lift(op, ia, ib)
            assert feasible_set(got.lower) == oracle(
                feasible_set(ia.lower), feasible_set(ib.lower))
            assert feasible_set(got.upper) == oracle(
                feasible_set(ia.upper), feasible_set(ib.upper))
            assert check_containment(got, enumerate_elements(pf))


def test_trace_lift_is_endpoint_wise_and_contained():
    rng = random.Random(1401)
    for _ in range(40):
        p, q = random_poset(rng, 3), random_poset(rng, 3)
        loop = random_pointed_poset(rng, 3)
        idp = random_interval(rng, Product([p, loop]), Product([q, loop]))
        got = interval_trace(idp)
        assert feasible_set(got.lower) == oracle_trace(feasible_set(idp.lower))
        assert feasible_set(got.upper) == oracle_trace(feasible_set(idp.upper))
        assert check_containment(got, enumerate_elements(p))


def test_interval_trace_forwards_iteration_controls():
    grams = NonNegReal("g")
    two = Product([grams, grams])
    slow_converger = map_dp(two, two, lambda fl: (fl[0] + 0.5 * fl[1],) * 2)
    clipped = interval_trace(embed_dp(slow_converger), max_iter=2)
    with pytest.raises(TraceDivergenceError):
        clipped.lower.query(1.0)
