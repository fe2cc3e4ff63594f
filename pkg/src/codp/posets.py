"""Partially ordered carriers and antichains.

Four poset kinds cover the solver's needs: nonnegative reals with a top
element (totally ordered, tagged with a unit string), finite discrete posets
given by an explicit order relation, products ordered componentwise, and
opposites. Antichains of minimal elements are the canonical finite
representation of upper sets, so Pareto fronts and query results are
antichains everywhere in the package.

Order comparisons are exact: no tolerance is applied to floats.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from .errors import (
    DomainMismatchError,
    InfinitePosetError,
    PosetMismatchError,
    UnsupportedPosetError,
)

#: Top of the nonnegative-real carrier: above every finite value.
TOP: float = float("inf")


def canonical_key(x: Any) -> Any:
    """Total sort key over elements, used for deterministic output order."""
    if isinstance(x, bool):
        raise DomainMismatchError(f"booleans are not poset elements: {x!r}")
    if isinstance(x, (int, float)):
        return (0, float(x))
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(canonical_key(c) for c in x))
    raise DomainMismatchError(f"unsupported element type: {type(x).__name__}")


class Poset:
    """Base class. Subclasses are immutable and compare structurally."""

    def leq(self, a: Any, b: Any) -> bool:
        """Decide a is-below-or-equal b.

        Membership of a and b is a precondition, not re-checked here; the
        validated boundaries are antichain construction and query entry.
        """
        raise NotImplementedError

    def contains(self, x: Any) -> bool:
        raise NotImplementedError

    def require_element(self, x: Any) -> Any:
        if not self.contains(x):
            raise DomainMismatchError(f"{x!r} is not an element of {self}")
        return x

    @property
    def is_finite(self) -> bool:
        raise NotImplementedError

    def iter_elements(self) -> Iterator[Any]:
        raise InfinitePosetError(f"cannot enumerate {self}")

    def bottom(self) -> Any:
        """Least element, if one exists."""
        raise UnsupportedPosetError(f"{self} has no least element")

    def top(self) -> Any:
        raise UnsupportedPosetError(f"{self} has no greatest element")

    def join(self, a: Any, b: Any) -> Any:
        """Least upper bound, when the poset has computable binary joins."""
        raise UnsupportedPosetError(f"{self} has no join procedure")

    def meet(self, a: Any, b: Any) -> Any:
        raise UnsupportedPosetError(f"{self} has no meet procedure")

    def minimal_upper_bounds(self, a: Any, b: Any) -> tuple[Any, ...]:
        """All minimal common upper bounds of a and b.

        Posets with true joins return the singleton (a v b,). Finite posets
        without joins fall back to enumeration.
        """
        try:
            return (self.join(a, b),)
        except UnsupportedPosetError:
            pass
        if self.is_finite:
            ubs = [x for x in self.iter_elements()
                   if self.leq(a, x) and self.leq(b, x)]
            return tuple(_minimal_of(self, ubs))
        raise UnsupportedPosetError(
            f"{self} supports neither joins nor enumeration")


@dataclass(frozen=True)
class NonNegReal(Poset):
    """Nonnegative reals with a top element, totally ordered, unit-tagged."""

    unit: str = ""

    def leq(self, a: Any, b: Any) -> bool:
        return a <= b

    def contains(self, x: Any) -> bool:
        return isinstance(x, (int, float)) and not isinstance(x, bool) and x >= 0

    @property
    def is_finite(self) -> bool:
        return False

    def bottom(self) -> float:
        return 0.0

    def top(self) -> float:
        return TOP

    def join(self, a: Any, b: Any) -> float:
        return float(max(a, b))

    def meet(self, a: Any, b: Any) -> float:
        return float(min(a, b))

    def __repr__(self) -> str:
        return f"NonNegReal({self.unit!r})" if self.unit else "NonNegReal()"


@dataclass(frozen=True)
class Discrete(Poset):
    """Finite poset over string labels with an explicit order relation.

    ``pairs`` may be any generating set; the reflexive-transitive closure is
    computed at construction and antisymmetry is verified, so the stored
    relation is always a valid partial order.
    """

    elements: tuple[str, ...]
    pairs: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    unit: str = ""

    def __init__(self, elements: Iterable[str],
                 pairs: Iterable[tuple[str, str]] = (), unit: str = "") -> None:
        labels = tuple(sorted(set(elements)))
        if not all(isinstance(e, str) for e in labels):
            raise ValueError("Discrete elements must be strings")
        rel = {(e, e) for e in labels}
        for a, b in pairs:
            if a not in labels or b not in labels:
                raise ValueError(f"order pair ({a!r}, {b!r}) uses unknown labels")
            rel.add((a, b))
        # Warshall closure over the label set.
        changed = True
        while changed:
            changed = False
            for a, b in list(rel):
                for c in labels:
                    if (b, c) in rel and (a, c) not in rel:
                        rel.add((a, c))
                        changed = True
        for a, b in rel:
            if a != b and (b, a) in rel:
                raise ValueError(f"order is not antisymmetric: {a!r} ~ {b!r}")
        object.__setattr__(self, "elements", labels)
        object.__setattr__(self, "pairs", frozenset(rel))
        object.__setattr__(self, "unit", unit)

    def leq(self, a: Any, b: Any) -> bool:
        return (a, b) in self.pairs

    def contains(self, x: Any) -> bool:
        return isinstance(x, str) and x in self.elements

    @property
    def is_finite(self) -> bool:
        return True

    def iter_elements(self) -> Iterator[str]:
        return iter(self.elements)

    def bottom(self) -> str:
        mins = _minimal_of(self, list(self.elements))
        if len(mins) != 1:
            raise UnsupportedPosetError(f"{self} has no least element")
        return mins[0]

    def top(self) -> str:
        maxs = [x for x in self.elements
                if not any(self.leq(x, y) and x != y for y in self.elements)]
        if len(maxs) != 1:
            raise UnsupportedPosetError(f"{self} has no greatest element")
        return maxs[0]

    def __repr__(self) -> str:
        return f"Discrete({list(self.elements)!r})"


@dataclass(frozen=True)
class Product(Poset):
    """Componentwise order on tuples. The empty product is the one-point poset."""

    components: tuple[Poset, ...]

    def __init__(self, components: Iterable[Poset]) -> None:
        object.__setattr__(self, "components", tuple(components))

    def leq(self, a: Any, b: Any) -> bool:
        for p, x, y in zip(self.components, a, b):
            if not p.leq(x, y):
                return False
        return True

    def contains(self, x: Any) -> bool:
        if not isinstance(x, tuple) or len(x) != len(self.components):
            return False
        for p, c in zip(self.components, x):
            if not p.contains(c):
                return False
        return True

    @property
    def is_finite(self) -> bool:
        return all(p.is_finite for p in self.components)

    def iter_elements(self) -> Iterator[tuple]:
        if not self.is_finite:
            raise InfinitePosetError(f"cannot enumerate {self}")
        return itertools.product(*(p.iter_elements() for p in self.components))

    def bottom(self) -> tuple:
        return tuple(p.bottom() for p in self.components)

    def top(self) -> tuple:
        return tuple(p.top() for p in self.components)

    def join(self, a: Any, b: Any) -> tuple:
        return tuple(p.join(x, y) for p, x, y in zip(self.components, a, b))

    def meet(self, a: Any, b: Any) -> tuple:
        return tuple(p.meet(x, y) for p, x, y in zip(self.components, a, b))

    def minimal_upper_bounds(self, a: Any, b: Any) -> tuple[Any, ...]:
        per_comp = [p.minimal_upper_bounds(x, y)
                    for p, x, y in zip(self.components, a, b)]
        return tuple(itertools.product(*per_comp))

    def __repr__(self) -> str:
        return f"Product({list(self.components)!r})"


@dataclass(frozen=True)
class Opposite(Poset):
    """The same carrier with the order reversed."""

    inner: Poset

    def leq(self, a: Any, b: Any) -> bool:
        return self.inner.leq(b, a)

    def contains(self, x: Any) -> bool:
        return self.inner.contains(x)

    @property
    def is_finite(self) -> bool:
        return self.inner.is_finite

    def iter_elements(self) -> Iterator[Any]:
        return self.inner.iter_elements()

    def bottom(self) -> Any:
        return self.inner.top()

    def top(self) -> Any:
        return self.inner.bottom()

    def join(self, a: Any, b: Any) -> Any:
        return self.inner.meet(a, b)

    def meet(self, a: Any, b: Any) -> Any:
        return self.inner.join(a, b)

    def __repr__(self) -> str:
        return f"Opposite({self.inner!r})"


def _minimal_of(poset: Poset, xs: list) -> list:
    """Minimal elements of xs (with duplicates removed), in input order."""
    distinct: list = []
    for x in xs:
        if x not in distinct:
            distinct.append(x)
    out = []
    for x in distinct:
        if not any(poset.leq(y, x) and y != x for y in distinct):
            out.append(x)
    return out


@dataclass(frozen=True)
class Antichain:
    """A finite set of pairwise-incomparable elements of one poset.

    Read as the upper set it generates: ``contains`` decides membership in
    that upper set. The empty antichain is the empty upper set (infeasible).
    Construction validates element membership and pairwise incomparability.
    """

    poset: Poset
    elements: frozenset

    def __init__(self, poset: Poset, elements: Iterable[Any]) -> None:
        elems = frozenset(elements)
        for x in elems:
            poset.require_element(x)
        for a, b in itertools.combinations(elems, 2):
            if poset.leq(a, b) or poset.leq(b, a):
                raise ValueError(
                    f"not an antichain: {a!r} and {b!r} are comparable")
        object.__setattr__(self, "poset", poset)
        object.__setattr__(self, "elements", elems)

    @classmethod
    def _trusted(cls, poset: Poset, elements: Iterable[Any]) -> "Antichain":
        # Internal constructor for elements already known to be valid,
        # deduplicated, and pairwise incomparable (e.g. minimals output).
        ac = object.__new__(cls)
        object.__setattr__(ac, "poset", poset)
        object.__setattr__(ac, "elements", frozenset(elements))
        return ac

    def contains(self, x: Any) -> bool:
        """Upper-set membership: is x above some element of the antichain?"""
        self.poset.require_element(x)
        return any(self.poset.leq(m, x) for m in self.elements)

    def sorted_elements(self) -> list:
        return sorted(self.elements, key=canonical_key)

    def __bool__(self) -> bool:
        return bool(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.sorted_elements())

    def __repr__(self) -> str:
        return f"Antichain({self.sorted_elements()!r})"


def minimals(poset: Poset, xs: Iterable[Any]) -> Antichain:
    """Antichain of minimal elements of an arbitrary finite subset."""
    items = [poset.require_element(x) for x in xs]
    return Antichain._trusted(poset, _minimal_of(poset, items))


def _minimals_trusted(poset: Poset, xs: Iterable[Any]) -> Antichain:
    # minimals without per-element membership validation, for candidates
    # that came out of validated antichains or joins of their elements.
    return Antichain._trusted(poset, _minimal_of(poset, list(xs)))


def upper_union(a: Antichain, b: Antichain) -> Antichain:
    """Minimal representation of the union of two upper sets."""
    _require_same_poset(a, b)
    return _minimals_trusted(a.poset, list(a.elements) + list(b.elements))


def upper_intersection(a: Antichain, b: Antichain) -> Antichain:
    """Minimal representation of the intersection of two upper sets.

    Computed from minimal common upper bounds of element pairs, which needs
    joins or a finite carrier; otherwise UnsupportedPosetError is raised.
    """
    _require_same_poset(a, b)
    candidates: list = []
    for x in a.elements:
        for y in b.elements:
            candidates.extend(a.poset.minimal_upper_bounds(x, y))
    return _minimals_trusted(a.poset, candidates)


def enumerate_elements(poset: Poset) -> list:
    """All elements of a finite poset, each exactly once, in canonical order."""
    if not poset.is_finite:
        raise InfinitePosetError(f"cannot enumerate {poset}")
    return sorted(poset.iter_elements(), key=canonical_key)


def _require_same_poset(a: Antichain, b: Antichain) -> None:
    if a.poset != b.poset:
        raise PosetMismatchError(
            f"antichains live in different posets: {a.poset} vs {b.poset}")
