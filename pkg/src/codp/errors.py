"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class CodpError(Exception):
    """Base class for all errors raised by this package."""


class DomainMismatchError(CodpError):
    """An element does not belong to the poset or space it was used with."""


class PosetMismatchError(CodpError):
    """Two operands disagree on a carrier poset (including unit metadata)."""


class UnsupportedPosetError(CodpError):
    """The requested operation has no procedure for this poset kind."""


class InfinitePosetError(CodpError):
    """Enumeration or brute-force search was asked of an infinite poset."""


class SpaceMismatchError(CodpError):
    """Kernel composition was attempted across incompatible spaces."""


class TraceDivergenceError(CodpError):
    """A feedback iteration failed to converge.

    Carries the functionality that was queried, the last antichain iterate,
    and the number of iterations performed before giving up.
    """

    def __init__(self, message: str, functionality: Any = None,
                 last_iterate: Any = None, iterations: int = 0) -> None:
        super().__init__(message)
        self.functionality = functionality
        self.last_iterate = last_iterate
        self.iterations = iterations


class DiagramSyntaxError(CodpError):
    """A .codp file failed to parse. Carries 1-based line and column."""

    def __init__(self, message: str, line: int, col: int = 1) -> None:
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class DiagramTypeError(CodpError):
    """A parsed diagram is structurally ill-typed (ports, units, cycles)."""

    def __init__(self, message: str, line: int | None = None) -> None:
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
