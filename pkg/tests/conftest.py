from __future__ import annotations

from pathlib import Path

import pytest

import tplkit.invariants

DATA = Path(__file__).resolve().parents[1] / "src" / "tplkit" / "data"

# acceptance lines collected during the run, echoed in the terminal summary
ACCEPTANCE: list[str] = []


@pytest.fixture(autouse=True)
def _verify_snf(monkeypatch):
    monkeypatch.setattr(tplkit.invariants, "VERIFY_TRANSFORMS", True)


@pytest.fixture
def data():
    return DATA


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
