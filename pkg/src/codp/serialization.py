"""JSON encodings for posets, elements, antichains, and query results.

Posets encode as tagged unions keyed by "kind". Elements encode relative to
their poset: reals as numbers with the top element spelled "top", labels as
strings, product elements as arrays. Antichain element lists are emitted in
canonical sorted order so equal antichains serialize byte-identically.
"""

from __future__ import annotations

from typing import Any

from .dp import QueryResult
from .errors import DomainMismatchError
from .posets import TOP, Antichain, Discrete, NonNegReal, Opposite, Poset, Product


def poset_to_json(poset: Poset) -> dict:
    if isinstance(poset, NonNegReal):
        return {"kind": "nonneg_real", "unit": poset.unit}
    if isinstance(poset, Discrete):
        pairs = sorted((a, b) for a, b in poset.pairs if a != b)
        return {"kind": "discrete", "elements": list(poset.elements),
                "pairs": [list(p) for p in pairs], "unit": poset.unit}
    if isinstance(poset, Product):
        return {"kind": "product",
                "components": [poset_to_json(c) for c in poset.components]}
    if isinstance(poset, Opposite):
        return {"kind": "opposite", "inner": poset_to_json(poset.inner)}
    raise DomainMismatchError(f"cannot serialize poset {poset!r}")


def poset_from_json(data: dict) -> Poset:
    kind = data.get("kind")
    if kind == "nonneg_real":
        return NonNegReal(unit=data.get("unit", ""))
    if kind == "discrete":
        return Discrete(data["elements"],
                        [tuple(p) for p in data.get("pairs", [])],
                        unit=data.get("unit", ""))
    if kind == "product":
        return Product([poset_from_json(c) for c in data["components"]])
    if kind == "opposite":
        return Opposite(poset_from_json(data["inner"]))
    raise DomainMismatchError(f"unknown poset kind {kind!r}")


def element_to_json(poset: Poset, x: Any) -> Any:
    poset.require_element(x)
    if isinstance(poset, Opposite):
        return element_to_json(poset.inner, x)
    if isinstance(poset, NonNegReal):
        return "top" if x == TOP else float(x)
    if isinstance(poset, Discrete):
        return x
    if isinstance(poset, Product):
        return [element_to_json(p, c) for p, c in zip(poset.components, x)]
    raise DomainMismatchError(f"cannot serialize element of {poset!r}")


def element_from_json(poset: Poset, data: Any) -> Any:
    if isinstance(poset, Opposite):
        return element_from_json(poset.inner, data)
    if isinstance(poset, NonNegReal):
        x = TOP if data == "top" else float(data)
        return poset.require_element(x)
    if isinstance(poset, Discrete):
        return poset.require_element(data)
    if isinstance(poset, Product):
        if not isinstance(data, list) or len(data) != len(poset.components):
            raise DomainMismatchError(f"bad product element {data!r}")
        return poset.require_element(tuple(
            element_from_json(p, c) for p, c in zip(poset.components, data)))
    raise DomainMismatchError(f"cannot deserialize element of {poset!r}")


def antichain_to_json(ac: Antichain, include_poset: bool = True) -> dict:
    out: dict = {"elements": [element_to_json(ac.poset, x)
                              for x in ac.sorted_elements()]}
    if include_poset:
        out["poset"] = poset_to_json(ac.poset)
    return out


def antichain_from_json(data: dict, poset: Poset | None = None) -> Antichain:
    if poset is None:
        poset = poset_from_json(data["poset"])
    return Antichain(poset, [element_from_json(poset, e)
                             for e in data["elements"]])


def query_result_to_json(result: QueryResult) -> dict:
    ac = result.minimal_resources
    witnesses = None
    if result.witnesses is not None:
        witnesses = [{"resource": element_to_json(ac.poset, r),
                      "impls": list(result.witnesses[r])}
                     for r in ac.sorted_elements()]
    return {"feasible": bool(ac), "minimal_resources": antichain_to_json(ac),
            "witnesses": witnesses}
