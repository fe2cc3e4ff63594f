"""Interval enclosures of design problems.

An IntervalDP brackets an imperfectly known problem between a pessimistic
endpoint (over-demands resources) and an optimistic one (under-demands).
Lifting an operator means applying it endpoint-wise, which keeps the
bracket valid because every composition operator is monotone with respect
to feasible-set inclusion.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

from ..dp import DesignProblem, trace
from ..errors import PosetMismatchError


@dataclass(frozen=True)
class IntervalDP:
    """Pessimistic and optimistic endpoint problems over shared carriers.

    Well-formed instances satisfy containment: every minimal resource of the
    pessimistic endpoint is reachable from some optimistic minimal resource
    below it, i.e. the pessimistic feasible set is included in the
    optimistic one.
    """

    lower: DesignProblem
    upper: DesignProblem

    def __post_init__(self) -> None:
        if (self.lower.fun_poset != self.upper.fun_poset
                or self.lower.res_poset != self.upper.res_poset):
            raise PosetMismatchError(
                "interval endpoints must share carriers: "
                f"{self.lower!r} vs {self.upper!r}")


def embed_dp(dp: DesignProblem) -> IntervalDP:
    """Degenerate interval: both endpoints are the known problem."""
    return IntervalDP(dp, dp)


def interval_lift(op: Callable[[DesignProblem, DesignProblem], DesignProblem],
                  a: IntervalDP, b: IntervalDP) -> IntervalDP:
    """Apply a binary composition operator endpoint-wise."""
    return IntervalDP(op(a.lower, b.lower), op(a.upper, b.upper))


def interval_trace(a: IntervalDP, **trace_kwargs) -> IntervalDP:
    """Close a feedback loop on both endpoints."""
    return IntervalDP(trace(a.lower, **trace_kwargs),
                      trace(a.upper, **trace_kwargs))


def check_containment(idp: IntervalDP, fs: Iterable) -> bool:
    """Verify the bracket on a probe set of functionalities.

    True when, for each probe f, every pessimistic minimal resource lies in
    the optimistic upper set.
    """
    for f in fs:
        optimistic = idp.upper.query(f)
        for r in idp.lower.query(f).elements:
            if not optimistic.contains(r):
                return False
    return True
