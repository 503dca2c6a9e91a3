"""Pytest configuration for rosen-mediant."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

_SRC_ROOT = Path(__file__).resolve().parents[1] / "src"
if _SRC_ROOT.exists():
    sys.path.insert(0, str(_SRC_ROOT))

from rosen_mediant.hecke_context import new_context  # noqa: E402


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption("--runslow", action="store_true", default=False, help="run desk-scale statistics tests")


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: desk-scale statistics runs (enable with --runslow)")


def pytest_collection_modifyitems(config: pytest.Config, items: list) -> None:
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def contexts():
    cache = {}

    def get(k: int, bits: int = 256):
        if (k, bits) not in cache:
            cache[(k, bits)] = new_context(k, bits)
        return cache[(k, bits)]

    return get


@pytest.fixture(scope="session")
def ctx4(contexts):
    return contexts(4)


@pytest.fixture(scope="session")
def ctx5(contexts):
    return contexts(5)


@pytest.fixture(scope="session")
def ctx8(contexts):
    return contexts(8)


@pytest.fixture(scope="session")
def ctx9(contexts):
    return contexts(9)
