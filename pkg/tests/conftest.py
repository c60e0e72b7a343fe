"""Shared fixtures and the acceptance summary printed after the run.

Tests tagged ``@pytest.mark.criterion(n)`` feed criterion ``n``: it passes
only when every tagged test passes.  ``acceptance.note(n, text)`` attaches
the measured numbers to the summary line.
"""
from __future__ import annotations

from collections import defaultdict

import pytest

from dunklflow.core import ReflectionConfig

CRITERIA = {
    1: "heat kernel normalization",
    2: "transform fidelity",
    3: "kernel oracle",
    4: "translation routes",
    5: "fractional kernel consistency",
    6: "kernel norm decay",
    7: "first-moment rate",
    8: "linear long-time limit",
    9: "absorbing nonlinear flow",
    10: "Young inequality",
}

_outcomes = defaultdict(list)
_notes = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test contributes to acceptance criterion n")


class _Acceptance:
    def note(self, n: int, text: str) -> None:
        _notes[n].append(text)


@pytest.fixture(scope="session")
def acceptance():
    return _Acceptance()


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if call.when == "call" or (call.when == "setup" and call.excinfo is not None):
        _outcomes[marker.args[0]].append(call.excinfo is None)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"[----] {n:2d}. {title}: not run")
            continue
        status = "PASS" if all(results) else "FAIL"
        detail = "; ".join(_notes.get(n, []))
        tr.write_line(f"[{status}] {n:2d}. {title} ({sum(results)}/{len(results)} tests)"
                      + (f": {detail}" if detail else ""))


@pytest.fixture(scope="session")
def k1():
    return ReflectionConfig.rank_one(1.0)


@pytest.fixture(scope="session")
def tensor2():
    return ReflectionConfig(2, (0.5, 1.0))
