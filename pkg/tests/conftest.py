"""Shared paths and an in-process CLI runner."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).resolve().parent
FIXTURES = TESTS_DIR / "fixtures"
DIAGRAMS = TESTS_DIR.parent / "diagrams"

# Let test modules import the oracle helpers regardless of invocation dir.
if str(TESTS_DIR) not in sys.path:
    sys.path.insert(0, str(TESTS_DIR))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def uav_diagram_path() -> Path:
    return DIAGRAMS / "uav.codp"


@pytest.fixture
def run_cli():
    """Invoke the CLI entry point in-process and return its exit code."""
    from codp.cli import main

    def run(*argv: str) -> int:
        return main([str(a) for a in argv])

    return run
