"""Design problems and their composition algebra.

A design problem (DP) maps a requested functionality to the antichain of
minimal resources sufficient to provide it; the induced feasible set is
upward closed in resources and downward closed in functionality. The
composition operators here (series, parallel, feedback trace, union,
intersection) preserve that monotone shape, so arbitrary interconnections
stay queryable.

Queries are memoized per problem; the caches are lock-guarded so one DP may
be queried from several threads.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping

from .errors import (
    DomainMismatchError,
    PosetMismatchError,
    TraceDivergenceError,
    UnsupportedPosetError,
)
from .posets import (
    Antichain,
    NonNegReal,
    Opposite,
    Poset,
    Product,
    _minimals_trusted,
    minimals,
    upper_intersection,
    upper_union,
)

#: Defaults for the feedback iteration.
TRACE_REL_TOL = 1e-9
TRACE_ABS_TOL = 1e-12
TRACE_MAX_ITER = 10_000
TRACE_MAX_VALUE = 1e18

WitnessFn = Callable[[Any, Antichain], dict]


@dataclass(frozen=True, eq=False)
class DesignProblem:
    """A monotone query map from functionality to minimal-resource antichains.

    ``query_fn`` must return, for each functionality, an Antichain over
    ``res_poset``; an empty antichain means the functionality is infeasible.
    """

    fun_poset: Poset
    res_poset: Poset
    query_fn: Callable[[Any], Antichain]
    name: str = ""
    witness_fn: WitnessFn | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock,
                                  repr=False, compare=False)

    def query(self, f: Any) -> Antichain:
        """Minimal resources for functionality f (memoized).

        Raises DomainMismatchError for f outside the functionality poset and
        TraceDivergenceError when a feedback iteration under f diverges.
        """
        self.fun_poset.require_element(f)
        return self._query_trusted(f)

    def _query_trusted(self, f: Any) -> Antichain:
        # Memoized query without entry validation; composition internals use
        # this for values already produced by validated queries.
        with self._lock:
            hit = self._cache.get(f)
        if hit is None:
            try:
                result = self.query_fn(f)
            except TraceDivergenceError as exc:
                hit = ("divergent", exc)
            else:
                if result.poset != self.res_poset:
                    raise PosetMismatchError(
                        f"query of {self.name or 'dp'} returned an antichain over "
                        f"{result.poset}, expected {self.res_poset}")
                hit = ("ok", result)
            with self._lock:
                self._cache.setdefault(f, hit)
                hit = self._cache[f]
        kind, payload = hit
        if kind == "divergent":
            raise payload
        return payload

    def witnesses(self, f: Any) -> dict | None:
        """Implementation witnesses for the minimal resources, if tracked."""
        if self.witness_fn is None:
            return None
        return self.witness_fn(f, self.query(f))

    def __repr__(self) -> str:
        label = self.name or "dp"
        return f"<DesignProblem {label}: {self.fun_poset} -> {self.res_poset}>"


@dataclass(frozen=True)
class QueryResult:
    """A minimal-resource antichain plus optional implementation witnesses."""

    minimal_resources: Antichain
    witnesses: Mapping[Any, tuple] | None = None


@dataclass(frozen=True, eq=False)
class ImplementationSet:
    """A finite catalog of implementations with their offers and demands.

    Each entry is (identifier, provided functionality, required resources).
    Identifiers are opaque strings and must be unique.
    """

    fun_poset: Poset
    res_poset: Poset
    entries: tuple[tuple[str, Any, Any], ...]

    def __init__(self, fun_poset: Poset, res_poset: Poset,
                 entries: Iterable[tuple[str, Any, Any]]) -> None:
        rows = []
        seen = set()
        for impl_id, prov, reqs in entries:
            if impl_id in seen:
                raise ValueError(f"duplicate implementation id {impl_id!r}")
            seen.add(impl_id)
            fun_poset.require_element(prov)
            res_poset.require_element(reqs)
            rows.append((impl_id, prov, reqs))
        object.__setattr__(self, "fun_poset", fun_poset)
        object.__setattr__(self, "res_poset", res_poset)
        object.__setattr__(self, "entries", tuple(rows))

    @property
    def impls(self) -> tuple[str, ...]:
        return tuple(e[0] for e in self.entries)

    def provides(self, impl_id: str) -> Any:
        return self._row(impl_id)[1]

    def requires(self, impl_id: str) -> Any:
        return self._row(impl_id)[2]

    def _row(self, impl_id: str) -> tuple[str, Any, Any]:
        for row in self.entries:
            if row[0] == impl_id:
                return row
        raise KeyError(impl_id)


def dp_from_mdpi(catalog: ImplementationSet, name: str = "") -> DesignProblem:
    """The design problem induced by a catalog: minimal demands that offer f."""

    def query_fn(f: Any) -> Antichain:
        feas = [reqs for _, prov, reqs in catalog.entries
                if catalog.fun_poset.leq(f, prov)]
        return minimals(catalog.res_poset, feas)

    def witness_fn(f: Any, result: Antichain) -> dict:
        out: dict = {}
        for r in result.sorted_elements():
            ids = tuple(sorted(
                impl_id for impl_id, prov, reqs in catalog.entries
                if catalog.fun_poset.leq(f, prov) and reqs == r))
            out[r] = ids
        return out

    return DesignProblem(catalog.fun_poset, catalog.res_poset, query_fn,
                         name=name or "mdpi", witness_fn=witness_fn)


def feasible(dp: DesignProblem, f: Any, r: Any) -> bool:
    """Is (f, r) a feasible pairing for dp?"""
    dp.res_poset.require_element(r)
    return dp.query(f).contains(r)


def query_fix_fun_min_res(dp: DesignProblem, f: Any) -> QueryResult:
    """Fix a functionality, return minimal resources and any witnesses."""
    return QueryResult(dp.query(f), dp.witnesses(f))


def query_fix_res_max_fun(dp: DesignProblem, r: Any,
                          f_grid: Iterable[Any]) -> Antichain:
    """Maximal feasible functionalities within a finite candidate grid.

    The dual query is answered on an explicit grid rather than symbolically;
    the result is an antichain over the opposite of the functionality poset,
    whose minimal elements are the grid's maximal feasible functionalities.
    """
    dp.res_poset.require_element(r)
    feas = [f for f in f_grid if feasible(dp, f, r)]
    return minimals(Opposite(dp.fun_poset), feas)


def identity_dp(poset: Poset, name: str = "id") -> DesignProblem:
    """Provides exactly what it consumes."""
    return map_dp(poset, poset, lambda x: x, name=name)


def map_dp(fun_poset: Poset, res_poset: Poset, fn: Callable[[Any], Any],
           name: str = "map") -> DesignProblem:
    """Wrap a monotone single-valued function as a design problem.

    The caller is responsible for monotonicity of ``fn``; nothing else keeps
    the composite algebra sound.
    """

    def query_fn(f: Any) -> Antichain:
        return Antichain(res_poset, (res_poset.require_element(fn(f)),))

    return DesignProblem(fun_poset, res_poset, query_fn, name=name)


def series(a: DesignProblem, b: DesignProblem, name: str = "") -> DesignProblem:
    """Feed a's required resources to b as requested functionality."""
    if a.res_poset != b.fun_poset:
        raise PosetMismatchError(
            f"series mismatch: {a.name or 'a'} requires over {a.res_poset} but "
            f"{b.name or 'b'} provides over {b.fun_poset}")

    def query_fn(f: Any) -> Antichain:
        found: list = []
        for q in a._query_trusted(f).elements:
            found.extend(b._query_trusted(q).elements)
        return _minimals_trusted(b.res_poset, found)

    return DesignProblem(a.fun_poset, b.res_poset, query_fn,
                         name=name or f"({a.name};{b.name})")


def parallel_all(dps: Iterable[DesignProblem], name: str = "") -> DesignProblem:
    """Independent side-by-side composition over flat product carriers."""
    parts = tuple(dps)
    fun_poset = Product([d.fun_poset for d in parts])
    res_poset = Product([d.res_poset for d in parts])

    def query_fn(f: Any) -> Antichain:
        per = [d._query_trusted(x).sorted_elements() for d, x in zip(parts, f)]
        combos = [tuple(c) for c in itertools.product(*per)]
        return _minimals_trusted(res_poset, combos)

    return DesignProblem(fun_poset, res_poset, query_fn,
                         name=name or "(" + "|".join(d.name for d in parts) + ")")


def parallel(a: DesignProblem, b: DesignProblem, name: str = "") -> DesignProblem:
    """Binary side-by-side composition."""
    return parallel_all((a, b), name=name)


def union(a: DesignProblem, b: DesignProblem, name: str = "") -> DesignProblem:
    """Free choice between alternatives: feasible if either side is."""
    _require_same_signature("union", a, b)

    def query_fn(f: Any) -> Antichain:
        return upper_union(a._query_trusted(f), b._query_trusted(f))

    witness_fn = None
    if a.witness_fn is not None and b.witness_fn is not None:
        def witness_fn(f: Any, result: Antichain) -> dict:
            wa = a.witnesses(f) or {}
            wb = b.witnesses(f) or {}
            return {r: tuple(sorted(set(wa.get(r, ())) | set(wb.get(r, ()))))
                    for r in result.sorted_elements()}

    return DesignProblem(a.fun_poset, a.res_poset, query_fn,
                         name=name or f"({a.name}v{b.name})",
                         witness_fn=witness_fn)


def intersection(a: DesignProblem, b: DesignProblem,
                 name: str = "") -> DesignProblem:
    """Both sides must be satisfied by one shared resource choice."""
    _require_same_signature("intersection", a, b)

    def query_fn(f: Any) -> Antichain:
        return upper_intersection(a._query_trusted(f), b._query_trusted(f))

    return DesignProblem(a.fun_poset, a.res_poset, query_fn,
                         name=name or f"({a.name}^{b.name})")


def trace(dp: DesignProblem, *, rel_tol: float = TRACE_REL_TOL,
          abs_tol: float = TRACE_ABS_TOL, max_iter: int = TRACE_MAX_ITER,
          max_value: float = TRACE_MAX_VALUE, name: str = "") -> DesignProblem:
    """Close a feedback loop around the second carrier component.

    ``dp`` must have functionality Product([P, L]) and resources
    Product([Q, L]) for the same loop poset L, which needs a least element.
    The closed problem maps p to the minimal q for which some loop level l
    is self-supporting: (q, l) feasible for dp at (p, l).

    The query iterates a Kleene ascent on antichains over Q x L, joining each
    iterate with the demands observed at its own loop level (via minimal
    upper bounds), so every fixed point consists exactly of the minimal
    self-supporting pairs. On finite posets the ascent terminates and is
    exact; on real-valued carriers it stops once no coordinate moves by more
    than ``abs_tol + rel_tol * magnitude``. Exceeding ``max_iter`` iterations
    or the ``max_value`` coordinate guard raises TraceDivergenceError.
    """
    if not isinstance(dp.fun_poset, Product) or len(dp.fun_poset.components) != 2:
        raise PosetMismatchError(
            f"trace needs functionality Product([P, L]); got {dp.fun_poset}")
    if not isinstance(dp.res_poset, Product) or len(dp.res_poset.components) != 2:
        raise PosetMismatchError(
            f"trace needs resources Product([Q, L]); got {dp.res_poset}")
    p_poset, loop_poset = dp.fun_poset.components
    q_poset, loop_res = dp.res_poset.components
    if loop_poset != loop_res:
        raise PosetMismatchError(
            f"loop carriers differ: {loop_poset} vs {loop_res}")
    loop_bottom = loop_poset.bottom()
    joint = dp.res_poset

    def query_fn(p: Any) -> Antichain:
        current = dp._query_trusted((p, loop_bottom))
        for iteration in range(1, max_iter + 1):
            candidates: list = []
            for q, level in current.elements:
                for demand in dp._query_trusted((p, level)).elements:
                    candidates.extend(
                        joint.minimal_upper_bounds((q, level), demand))
            nxt = _collapse_close(
                _minimals_trusted(joint, candidates), joint, rel_tol, abs_tol)
            if not nxt:
                return Antichain(q_poset, ())
            if _exceeds(nxt, max_value):
                raise TraceDivergenceError(
                    f"feedback iteration exceeded {max_value:g} after "
                    f"{iteration} iterations", functionality=p,
                    last_iterate=nxt, iterations=iteration)
            if _stable(current, nxt, rel_tol, abs_tol):
                front = _minimals_trusted(q_poset,
                                          [q for q, _ in nxt.elements])
                return _prune_tol(front, q_poset, rel_tol, abs_tol)
            current = nxt
        raise TraceDivergenceError(
            f"feedback iteration did not settle within {max_iter} iterations",
            functionality=p, last_iterate=current, iterations=max_iter)

    return DesignProblem(p_poset, q_poset, query_fn,
                         name=name or f"trace({dp.name})")


def _require_same_signature(op: str, a: DesignProblem, b: DesignProblem) -> None:
    if a.fun_poset != b.fun_poset or a.res_poset != b.res_poset:
        raise PosetMismatchError(
            f"{op} needs matching carriers: "
            f"{a.fun_poset} -> {a.res_poset} vs {b.fun_poset} -> {b.res_poset}")


def _leq_tol(poset: Poset, a: Any, b: Any, rel_tol: float,
             abs_tol: float) -> bool:
    # a below b up to the iteration tolerance on real coordinates; exact
    # order everywhere else.
    if isinstance(poset, Product):
        return all(_leq_tol(p, x, y, rel_tol, abs_tol)
                   for p, x, y in zip(poset.components, a, b))
    if isinstance(poset, Opposite):
        return _leq_tol(poset.inner, b, a, rel_tol, abs_tol)
    if isinstance(poset, NonNegReal):
        return a <= b + abs_tol + rel_tol * max(abs(a), abs(b))
    return poset.leq(a, b)


def _prune_tol(ac: Antichain, poset: Poset, rel_tol: float,
               abs_tol: float) -> Antichain:
    """Drop converged-front points dominated within the stopping tolerance.

    Distinct loop trajectories freeze a rounding step apart, which can leave
    points that a genuine front point beats on every coordinate except for a
    sub-tolerance sliver. Such points carry no information at the accuracy
    the iteration guarantees, so a point falls when a retained one sits at or
    below it (within tolerance) on every coordinate. Scanning strong pruners
    first lets one genuine point absorb its whole shadow; the first point
    scanned always survives, so a cluster can never annihilate entirely.
    Exact carriers are untouched because there minimality already decided.
    """
    elems = ac.sorted_elements()
    n = len(elems)
    if n < 2:
        return ac
    dom = [[i != j and _leq_tol(poset, elems[i], elems[j], rel_tol, abs_tol)
            for j in range(n)] for i in range(n)]
    order = sorted(range(n), key=lambda i: (-sum(dom[i]), i))
    kept: list[int] = []
    for i in order:
        if not any(dom[k][i] for k in kept):
            kept.append(i)
    if len(kept) == n:
        return ac
    return Antichain._trusted(poset, (elems[i] for i in kept))


def _merge_close(x: Any, y: Any) -> Any:
    # Upper bound of two _close elements: max over numeric coordinates,
    # shared value elsewhere (closeness implies equality off the reals).
    if isinstance(x, tuple) and isinstance(y, tuple):
        return tuple(_merge_close(a, b) for a, b in zip(x, y))
    if isinstance(x, (int, float)) and isinstance(y, (int, float)):
        return max(x, y)
    return x


def _collapse_close(ac: Antichain, poset: Poset, rel_tol: float,
                    abs_tol: float) -> Antichain:
    """Merge tolerance-duplicates of a trace iterate.

    Converging trajectories from different discrete choices leave clusters of
    points a rounding error apart and exactly incomparable; each cluster is
    replaced by its coordinatewise maximum, which dominates everything it
    absorbs, so the iteration still never claims feasibility below a reached
    level. Exact carriers are unaffected: closeness there is equality.
    """
    if len(ac) < 2:
        return ac
    out: list = []
    changed = False
    for x in ac.sorted_elements():
        for i, y in enumerate(out):
            if _close(x, y, rel_tol, abs_tol):
                out[i] = _merge_close(x, y)
                changed = True
                break
        else:
            out.append(x)
    if not changed:
        return ac
    return _minimals_trusted(poset, out)


def _close(x: Any, y: Any, rel_tol: float, abs_tol: float) -> bool:
    if isinstance(x, tuple) and isinstance(y, tuple):
        return len(x) == len(y) and all(
            _close(a, b, rel_tol, abs_tol) for a, b in zip(x, y))
    if isinstance(x, (int, float)) and isinstance(y, (int, float)):
        if x == y:
            return True
        return abs(x - y) <= abs_tol + rel_tol * max(abs(x), abs(y))
    return x == y


def _stable(prev: Antichain, nxt: Antichain, rel_tol: float,
            abs_tol: float) -> bool:
    a = prev.sorted_elements()
    b = nxt.sorted_elements()
    return len(a) == len(b) and all(
        _close(x, y, rel_tol, abs_tol) for x, y in zip(a, b))


def _exceeds(ac: Antichain, bound: float) -> bool:
    def too_big(x: Any) -> bool:
        if isinstance(x, tuple):
            return any(too_big(c) for c in x)
        return isinstance(x, (int, float)) and x > bound

    return any(too_big(e) for e in ac.elements)
