"""Parameterized families and Markov kernels over design problems.

A ParameterizedDP is a deterministic family: parameter in, problem out. A
MarkovKernel is its stochastic counterpart: ``draw(param, seed)`` samples an
outcome (often a design problem) from the conditional distribution at that
parameter. Kernels compose along parameter chains (marginalizing the middle
space), multiply into product kernels, and lift the composition operators
so that uncertain subproblems combine exactly like deterministic ones.

Kernels with finite support may carry an explicit conditional probability
table; table algebra (products, chain composition) is exact, and sampling
paths are checked against tables statistically in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping

from ..dp import DesignProblem, feasible, intersection, parallel, series, trace, union
from ..errors import DomainMismatchError, PosetMismatchError, SpaceMismatchError
from ..posets import Poset, Product
from ..seeds import check_seed, derive, rng
from .sampling import DPSampler

#: Two-sided 95% normal quantile, used by the Wilson interval.
Z_95 = 1.959963984540054

Pmf = Mapping[Any, Mapping[Any, float]]


class Space:
    """A parameter or outcome space; subclasses decide membership."""

    def contains(self, x: Any) -> bool:
        raise NotImplementedError

    def require(self, x: Any) -> Any:
        if not self.contains(x):
            raise DomainMismatchError(f"{x!r} is not a point of {self}")
        return x


@dataclass(frozen=True)
class FiniteSpace(Space):
    """A finite labeled set."""

    labels: tuple[str, ...]

    def __init__(self, labels: Iterable[str]) -> None:
        object.__setattr__(self, "labels", tuple(labels))
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("duplicate labels")

    def contains(self, x: Any) -> bool:
        return isinstance(x, str) and x in self.labels

    def __repr__(self) -> str:
        return f"FiniteSpace({list(self.labels)!r})"


@dataclass(frozen=True)
class BoxSpace(Space):
    """A box of real vectors, componentwise bounded."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def contains(self, x: Any) -> bool:
        return (isinstance(x, tuple) and len(x) == len(self.lows)
                and all(isinstance(v, (int, float)) and lo <= v <= hi
                        for v, lo, hi in zip(x, self.lows, self.highs)))


@dataclass(frozen=True)
class ProductSpace(Space):
    """Tuples of points, one per component space."""

    components: tuple[Space, ...]

    def __init__(self, components: Iterable[Space]) -> None:
        object.__setattr__(self, "components", tuple(components))

    def contains(self, x: Any) -> bool:
        return (isinstance(x, tuple) and len(x) == len(self.components)
                and all(s.contains(c) for s, c in zip(self.components, x)))


@dataclass(frozen=True)
class RecordSpace(Space):
    """All instances of one record (dataclass) type."""

    record_type: type

    def contains(self, x: Any) -> bool:
        return isinstance(x, self.record_type)

    def __repr__(self) -> str:
        return f"RecordSpace({self.record_type.__name__})"


@dataclass(frozen=True)
class DPSpace(Space):
    """Design problems over fixed carriers."""

    fun_poset: Poset
    res_poset: Poset

    def contains(self, x: Any) -> bool:
        return (isinstance(x, DesignProblem)
                and x.fun_poset == self.fun_poset
                and x.res_poset == self.res_poset)


#: The one-point parameter space; its only point is the empty tuple.
UNIT_SPACE = ProductSpace(())


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """A conditional distribution: parameter and seed in, outcome out.

    ``pmf``, when present, is the exact conditional table
    {param: {outcome label: probability}} for finite-support kernels;
    ``support`` optionally maps outcome labels to richer outcome objects
    (the table then describes draws up to that mapping).
    """

    domain: Space
    codomain: Space
    draw_fn: Callable[[Any, int], Any]
    pmf: Pmf | None = None
    support: Mapping[Any, Any] | None = None
    name: str = ""

    def draw(self, param: Any, seed: int) -> Any:
        """Sample the conditional at ``param``. Same (param, seed), same outcome."""
        self.domain.require(param)
        check_seed(seed)
        out = self.draw_fn(param, seed)
        self.codomain.require(out)
        return out


def _validated_pmf(pmf: Pmf) -> dict:
    table: dict = {}
    for param, row in pmf.items():
        total = 0.0
        for label, prob in row.items():
            if prob < 0:
                raise ValueError(f"negative probability for {label!r}")
            total += prob
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"row for {param!r} sums to {total!r}, expected 1")
        table[param] = dict(row)
    return table


def finite_kernel(domain: Space, pmf: Pmf,
                  support: Mapping[Any, Any] | None = None,
                  codomain: Space | None = None,
                  name: str = "") -> MarkovKernel:
    """Kernel defined by an explicit conditional table.

    Draws walk cumulative probabilities over the row's labels in sorted
    order with a single uniform variate, so sampling agrees exactly with the
    table. Outcomes are the labels themselves, or ``support[label]`` when a
    support mapping is given.
    """
    table = _validated_pmf(pmf)
    labels = sorted({lab for row in table.values() for lab in row})
    if codomain is None:
        codomain = FiniteSpace(labels) if support is None else RecordSpace(object)

    def draw_fn(param: Any, seed: int) -> Any:
        row = table[param]
        u = rng(seed).random()
        acc = 0.0
        chosen = None
        for label in sorted(row, key=str):
            acc += row[label]
            chosen = label
            if u < acc:
                break
        return support[chosen] if support is not None else chosen

    return MarkovKernel(domain, codomain, draw_fn, pmf=table,
                        support=dict(support) if support else None,
                        name=name or "table")


def delta_kernel(fn: Callable[[Any], Any], domain: Space, codomain: Space,
                 name: str = "") -> MarkovKernel:
    """Deterministic kernel: the seed is ignored, outcomes follow ``fn``.

    When both spaces are finite label sets the exact table (all point
    masses) is attached.
    """
    pmf = None
    if isinstance(domain, FiniteSpace) and isinstance(codomain, FiniteSpace):
        pmf = {m: {fn(m): 1.0} for m in domain.labels}
    return MarkovKernel(domain, codomain, lambda m, seed: fn(m), pmf=pmf,
                        name=name or "delta")


def kernel_product(a: MarkovKernel, b: MarkovKernel,
                   name: str = "") -> MarkovKernel:
    """Independent pairing: parameters pair up, operand streams split."""

    def draw_fn(param: tuple, seed: int) -> tuple:
        ma, mb = param
        return (a.draw(ma, derive(seed, 0)), b.draw(mb, derive(seed, 1)))

    pmf = None
    support = None
    if a.pmf is not None and b.pmf is not None:
        pmf = {(ma, mb): {(la, lb): pa * pb
                          for la, pa in a.pmf[ma].items()
                          for lb, pb in b.pmf[mb].items()}
               for ma in a.pmf for mb in b.pmf}
        if a.support is not None and b.support is not None:
            support = {(la, lb): (oa, ob)
                       for la, oa in a.support.items()
                       for lb, ob in b.support.items()}
    return MarkovKernel(ProductSpace([a.domain, b.domain]),
                        ProductSpace([a.codomain, b.codomain]),
                        draw_fn, pmf=pmf, support=support,
                        name=name or f"({a.name}*{b.name})")


def kernel_compose(g: MarkovKernel, f: MarkovKernel,
                   name: str = "") -> MarkovKernel:
    """Chain f then g, marginalizing the middle space.

    ``draw`` samples the middle point from f (child stream 0) and feeds it
    to g (child stream 1). When both carry tables over matching labels the
    composite table is their Chapman-Kolmogorov product.
    """
    if f.codomain != g.domain:
        raise SpaceMismatchError(
            f"cannot chain: {f.name or 'f'} lands in {f.codomain}, "
            f"{g.name or 'g'} expects {g.domain}")

    def draw_fn(param: Any, seed: int) -> Any:
        mid = f.draw(param, derive(seed, 0))
        return g.draw(mid, derive(seed, 1))

    pmf = None
    if f.pmf is not None and g.pmf is not None and f.support is None:
        pmf = {}
        for param, row in f.pmf.items():
            out: dict = {}
            for mid, p_mid in row.items():
                for label, p_out in g.pmf[mid].items():
                    out[label] = out.get(label, 0.0) + p_mid * p_out
            pmf[param] = out
    return MarkovKernel(f.domain, g.codomain, draw_fn, pmf=pmf,
                        support=dict(g.support) if g.support else None,
                        name=name or f"({g.name}o{f.name})")


def reparam_kernel(a: MarkovKernel, r: MarkovKernel,
                   name: str = "") -> MarkovKernel:
    """Pull a kernel back along an uncertain parameter translation."""
    return kernel_compose(a, r, name=name or f"reparam({a.name})")


def condition(kernel: MarkovKernel, param: Any, name: str = "") -> DPSampler:
    """Freeze the parameter of a problem-valued kernel, leaving a sampler."""
    if not isinstance(kernel.codomain, DPSpace):
        raise SpaceMismatchError(
            f"conditioning needs a problem-valued kernel, got {kernel.codomain}")
    kernel.domain.require(param)
    return DPSampler(kernel.codomain.fun_poset, kernel.codomain.res_poset,
                     lambda seed: kernel.draw(param, seed),
                     name=name or f"{kernel.name}@{param!r}")


@dataclass(frozen=True, eq=False)
class ParameterizedDP:
    """A deterministic family of problems indexed by a parameter space."""

    domain: Space
    fun_poset: Poset
    res_poset: Poset
    build_fn: Callable[[Any], DesignProblem]
    name: str = ""

    def build(self, param: Any) -> DesignProblem:
        self.domain.require(param)
        dp = self.build_fn(param)
        if dp.fun_poset != self.fun_poset or dp.res_poset != self.res_poset:
            raise PosetMismatchError(
                f"family {self.name or '?'} built a problem over "
                f"{dp.fun_poset} -> {dp.res_poset}, expected "
                f"{self.fun_poset} -> {self.res_poset}")
        return dp


def reparam(a: ParameterizedDP, translate: Callable[[Any], Any],
            domain: Space, name: str = "") -> ParameterizedDP:
    """Pull a family back along a deterministic parameter translation."""

    def build_fn(param: Any) -> DesignProblem:
        return a.build(a.domain.require(translate(param)))

    return ParameterizedDP(domain, a.fun_poset, a.res_poset, build_fn,
                           name=name or f"reparam({a.name})")


def _param_lift(op, a: ParameterizedDP, b: ParameterizedDP, fun_poset: Poset,
                res_poset: Poset, name: str) -> ParameterizedDP:
    def build_fn(param: tuple) -> DesignProblem:
        ma, mb = param
        return op(a.build(ma), b.build(mb))

    return ParameterizedDP(ProductSpace([a.domain, b.domain]), fun_poset,
                           res_poset, build_fn, name=name)


def param_lift_series(a: ParameterizedDP, b: ParameterizedDP) -> ParameterizedDP:
    if a.res_poset != b.fun_poset:
        raise PosetMismatchError(
            f"series lift mismatch: {a.res_poset} vs {b.fun_poset}")
    return _param_lift(series, a, b, a.fun_poset, b.res_poset,
                       f"({a.name};{b.name})")


def param_lift_parallel(a: ParameterizedDP, b: ParameterizedDP) -> ParameterizedDP:
    return _param_lift(parallel, a, b, Product([a.fun_poset, b.fun_poset]),
                       Product([a.res_poset, b.res_poset]),
                       f"({a.name}|{b.name})")


def param_lift_union(a: ParameterizedDP, b: ParameterizedDP) -> ParameterizedDP:
    _require_same_carriers(a, b)
    return _param_lift(union, a, b, a.fun_poset, a.res_poset,
                       f"({a.name}v{b.name})")


def param_lift_intersection(a: ParameterizedDP,
                            b: ParameterizedDP) -> ParameterizedDP:
    _require_same_carriers(a, b)
    return _param_lift(intersection, a, b, a.fun_poset, a.res_poset,
                       f"({a.name}^{b.name})")


def param_lift_trace(a: ParameterizedDP, **trace_kwargs) -> ParameterizedDP:
    if not isinstance(a.fun_poset, Product) or len(a.fun_poset.components) != 2:
        raise PosetMismatchError(
            f"trace lift needs Product([P, L]) functionality, got {a.fun_poset}")

    def build_fn(param: Any) -> DesignProblem:
        return trace(a.build(param), **trace_kwargs)

    return ParameterizedDP(a.domain, a.fun_poset.components[0],
                           a.res_poset.components[0], build_fn,
                           name=f"trace({a.name})")


def _require_dp_kernel(k: MarkovKernel) -> DPSpace:
    if not isinstance(k.codomain, DPSpace):
        raise SpaceMismatchError(
            f"lift needs problem-valued kernels, got {k.codomain}")
    return k.codomain


def _kernel_lift(op, a: MarkovKernel, b: MarkovKernel, codomain: DPSpace,
                 name: str) -> MarkovKernel:
    # Matches the sampler lift stream-for-stream: left child 0, right child 1,
    # so conditioning on a parameter pair reproduces the lifted samplers.
    def draw_fn(param: tuple, seed: int) -> DesignProblem:
        ma, mb = param
        return op(a.draw(ma, derive(seed, 0)), b.draw(mb, derive(seed, 1)))

    return MarkovKernel(ProductSpace([a.domain, b.domain]), codomain, draw_fn,
                        name=name)


def kernel_lift_series(a: MarkovKernel, b: MarkovKernel) -> MarkovKernel:
    ca, cb = _require_dp_kernel(a), _require_dp_kernel(b)
    if ca.res_poset != cb.fun_poset:
        raise PosetMismatchError(
            f"series lift mismatch: {ca.res_poset} vs {cb.fun_poset}")
    return _kernel_lift(series, a, b, DPSpace(ca.fun_poset, cb.res_poset),
                        f"({a.name};{b.name})")


def kernel_lift_parallel(a: MarkovKernel, b: MarkovKernel) -> MarkovKernel:
    ca, cb = _require_dp_kernel(a), _require_dp_kernel(b)
    return _kernel_lift(parallel, a, b,
                        DPSpace(Product([ca.fun_poset, cb.fun_poset]),
                                Product([ca.res_poset, cb.res_poset])),
                        f"({a.name}|{b.name})")


def kernel_lift_union(a: MarkovKernel, b: MarkovKernel) -> MarkovKernel:
    ca, cb = _require_dp_kernel(a), _require_dp_kernel(b)
    if ca != cb:
        raise PosetMismatchError("union lift needs matching carriers")
    return _kernel_lift(union, a, b, ca, f"({a.name}v{b.name})")


def kernel_lift_intersection(a: MarkovKernel, b: MarkovKernel) -> MarkovKernel:
    ca, cb = _require_dp_kernel(a), _require_dp_kernel(b)
    if ca != cb:
        raise PosetMismatchError("intersection lift needs matching carriers")
    return _kernel_lift(intersection, a, b, ca, f"({a.name}^{b.name})")


def kernel_lift_trace(a: MarkovKernel, **trace_kwargs) -> MarkovKernel:
    ca = _require_dp_kernel(a)
    if not isinstance(ca.fun_poset, Product) or len(ca.fun_poset.components) != 2:
        raise PosetMismatchError(
            f"trace lift needs Product([P, L]) functionality, got {ca.fun_poset}")

    def draw_fn(param: Any, seed: int) -> DesignProblem:
        return trace(a.draw(param, seed), **trace_kwargs)

    return MarkovKernel(a.domain,
                        DPSpace(ca.fun_poset.components[0],
                                ca.res_poset.components[0]),
                        draw_fn, name=f"trace({a.name})")


def wilson_interval(successes: int, n: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        raise ValueError("n must be positive")
    p_hat = successes / n
    denom = 1.0 + z * z / n
    center = (p_hat + z * z / (2 * n)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class SuccessEstimate:
    """Monte Carlo estimate of a feasibility probability."""

    p_hat: float
    ci_lo: float
    ci_hi: float
    n: int
    root_seed: int

    def to_json(self) -> dict:
        return {"p_hat": self.p_hat, "ci_lo": self.ci_lo, "ci_hi": self.ci_hi,
                "n": self.n, "root_seed": self.root_seed}


def success_probability(a: MarkovKernel, param: Any, f: Any, r: Any, n: int,
                        root_seed: int) -> SuccessEstimate:
    """Estimate the probability that the drawn problem accepts (f, r).

    Draw i uses the child seed derive(root_seed, i); the point estimate is
    the feasible fraction and the 95% bound is the Wilson score interval.
    """
    _require_dp_kernel(a)
    if n <= 0:
        raise ValueError("n must be positive")
    check_seed(root_seed)
    successes = 0
    for i in range(n):
        dp = a.draw(param, derive(root_seed, i))
        if feasible(dp, f, r):
            successes += 1
    lo, hi = wilson_interval(successes, n)
    return SuccessEstimate(successes / n, lo, hi, n, root_seed)
