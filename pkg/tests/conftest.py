from __future__ import annotations

import functools

import pytest

from artifact.cli import load_preset
from artifact.finite_type import detect_finite_type
from artifact.net import NetTree

ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def preset(name: str):
    return load_preset(name)


@functools.lru_cache(maxsize=None)
def tree_for(name: str) -> NetTree:
    return NetTree(preset(name))


@functools.lru_cache(maxsize=None)
def graph_for(name: str):
    return detect_finite_type(tree_for(name), max_levels=12)


@pytest.fixture
def record_criterion():
    def record(number: int, title: str, checks: dict) -> bool:
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        tail = "" if ok else "  failing: " + "; ".join(failed)
        ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title}{tail}")
        print(ACCEPTANCE_LINES[-1])
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
