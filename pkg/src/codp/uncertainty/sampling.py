"""Seeded samplers of design problems.

A DPSampler is an operational distribution: a pure function from a 64-bit
seed to a design problem over fixed carriers. Lifted composition operators
split the incoming seed into one independent child stream per operand (see
codp.seeds), so a composite sampler is reproducible from a single root seed
and operand draws never share a stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Iterable, Sequence

from ..dp import DesignProblem, intersection, parallel, series, trace, union
from ..errors import PosetMismatchError
from ..posets import Poset, Product
from ..seeds import check_seed, derive, rng


@dataclass(frozen=True)
class DPSampler:
    """Seed-indexed family of design problems over fixed carriers."""

    fun_poset: Poset
    res_poset: Poset
    draw_fn: Callable[[int], DesignProblem]
    name: str = ""

    def draw(self, seed: int) -> DesignProblem:
        """The problem at this seed. Same seed, same problem."""
        check_seed(seed)
        dp = self.draw_fn(seed)
        if dp.fun_poset != self.fun_poset or dp.res_poset != self.res_poset:
            raise PosetMismatchError(
                f"sampler {self.name or '?'} drew a problem over "
                f"{dp.fun_poset} -> {dp.res_poset}, expected "
                f"{self.fun_poset} -> {self.res_poset}")
        return dp


def delta_sampler(dp: DesignProblem, name: str = "") -> DPSampler:
    """Point mass: every seed yields the same problem."""
    return DPSampler(dp.fun_poset, dp.res_poset, lambda seed: dp,
                     name=name or f"delta({dp.name})")


def finite_sampler(dps: Sequence[DesignProblem], weights: Sequence[float],
                   name: str = "") -> DPSampler:
    """Weighted choice among finitely many problems.

    Weights must be nonnegative and sum to 1 (within 1e-12). The draw uses
    one uniform variate per seed against cumulative weights, in the given
    order, so the distribution is exactly the stated one.
    """
    if len(dps) != len(weights) or not dps:
        raise ValueError("need equally many problems and weights, at least one")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise ValueError(f"weights sum to {sum(weights)!r}, expected 1")
    first = dps[0]
    for dp in dps:
        if dp.fun_poset != first.fun_poset or dp.res_poset != first.res_poset:
            raise PosetMismatchError("all alternatives must share carriers")

    def draw_fn(seed: int) -> DesignProblem:
        u = rng(seed).random()
        acc = 0.0
        for dp, w in zip(dps, weights):
            acc += w
            if u < acc:
                return dp
        return dps[-1]

    return DPSampler(first.fun_poset, first.res_poset, draw_fn,
                     name=name or "finite")


def pushforward(fn: Callable[[DesignProblem], DesignProblem], s: DPSampler,
                fun_poset: Poset | None = None, res_poset: Poset | None = None,
                name: str = "") -> DPSampler:
    """Transform every draw by a problem-to-problem map.

    Carriers of the image default to the source's; pass them explicitly when
    ``fn`` changes signatures.
    """
    return DPSampler(fun_poset or s.fun_poset, res_poset or s.res_poset,
                     lambda seed: fn(s.draw(seed)),
                     name=name or f"push({s.name})")


def _lift_binary(op: Callable[[DesignProblem, DesignProblem], DesignProblem],
                 p: DPSampler, q: DPSampler, fun_poset: Poset,
                 res_poset: Poset, name: str) -> DPSampler:
    # Operand independence: left operand gets child stream 0, right gets 1.
    def draw_fn(seed: int) -> DesignProblem:
        return op(p.draw(derive(seed, 0)), q.draw(derive(seed, 1)))

    return DPSampler(fun_poset, res_poset, draw_fn, name=name)


def dist_lift_series(p: DPSampler, q: DPSampler) -> DPSampler:
    if p.res_poset != q.fun_poset:
        raise PosetMismatchError(
            f"series lift mismatch: {p.res_poset} vs {q.fun_poset}")
    return _lift_binary(series, p, q, p.fun_poset, q.res_poset,
                        f"({p.name};{q.name})")


def dist_lift_parallel(p: DPSampler, q: DPSampler) -> DPSampler:
    return _lift_binary(parallel, p, q,
                        Product([p.fun_poset, q.fun_poset]),
                        Product([p.res_poset, q.res_poset]),
                        f"({p.name}|{q.name})")


def dist_lift_union(p: DPSampler, q: DPSampler) -> DPSampler:
    _require_same_carriers(p, q)
    return _lift_binary(union, p, q, p.fun_poset, p.res_poset,
                        f"({p.name}v{q.name})")


def dist_lift_intersection(p: DPSampler, q: DPSampler) -> DPSampler:
    _require_same_carriers(p, q)
    return _lift_binary(intersection, p, q, p.fun_poset, p.res_poset,
                        f"({p.name}^{q.name})")


def dist_lift_trace(p: DPSampler, **trace_kwargs) -> DPSampler:
    """Close the loop on every draw; unary, so the seed passes through."""
    if not isinstance(p.fun_poset, Product) or len(p.fun_poset.components) != 2:
        raise PosetMismatchError(
            f"trace lift needs Product([P, L]) functionality, got {p.fun_poset}")
    if not isinstance(p.res_poset, Product) or len(p.res_poset.components) != 2:
        raise PosetMismatchError(
            f"trace lift needs Product([Q, L]) resources, got {p.res_poset}")

    def draw_fn(seed: int) -> DesignProblem:
        return trace(p.draw(seed), **trace_kwargs)

    return DPSampler(p.fun_poset.components[0], p.res_poset.components[0],
                     draw_fn, name=f"trace({p.name})")


def _require_same_carriers(p: DPSampler, q: DPSampler) -> None:
    if p.fun_poset != q.fun_poset or p.res_poset != q.res_poset:
        raise PosetMismatchError(
            f"lift needs matching carriers: {p.fun_poset} -> {p.res_poset} "
            f"vs {q.fun_poset} -> {q.res_poset}")
