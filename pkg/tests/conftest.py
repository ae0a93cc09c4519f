"""Shared fixtures: one memoized bound book per session, one CLI run per
report-producing subcommand, and the acceptance summary lines."""

from __future__ import annotations

import json
import time

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    derandomize=True,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

_criterion_results: dict[int, bool] = {}


def record_criterion(number: int, ok: bool) -> None:
    _criterion_results[number] = ok
    print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'}")


def pytest_terminal_summary(terminalreporter) -> None:
    if not _criterion_results:
        return
    terminalreporter.write_line("")
    for number in sorted(_criterion_results):
        verdict = "PASS" if _criterion_results[number] else "FAIL"
        terminalreporter.write_line(f"CRITERION {number}: {verdict}")


@pytest.fixture(scope="session")
def book291():
    from zeroledger.tables import BoundBook

    return BoundBook(0.291)


@pytest.fixture(scope="session")
def tables_run(tmp_path_factory):
    """Cold verify-tables CLI run: (exit_code, report dict, wall seconds)."""
    from zeroledger.cli import main

    out = tmp_path_factory.mktemp("reports") / "tables.json"
    start = time.monotonic()
    code = main(["verify-tables", "--out", str(out)])
    wall = time.monotonic() - start
    doc = json.loads(out.read_text(encoding="utf-8"))
    return code, doc, wall


@pytest.fixture(scope="session")
def cases_run(tmp_path_factory):
    """verify-cases CLI run at the default delta: (exit_code, report dict)."""
    from zeroledger.cli import main

    out = tmp_path_factory.mktemp("reports") / "cases.json"
    code = main(["verify-cases", "--out", str(out)])
    doc = json.loads(out.read_text(encoding="utf-8"))
    return code, doc
