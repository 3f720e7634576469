"""Shared fixtures and the acceptance report hook."""

from __future__ import annotations

import numpy as np
import pytest

_CHECKS: list[tuple[str, str, bool, str]] = []


class AcceptanceReport:
    """Records acceptance checks; the terminal summary prints them grouped by criterion."""

    def __call__(self, criterion: str, check: str, passed: bool, detail: str = "") -> bool:
        passed = bool(passed)
        _CHECKS.append((criterion, check, passed, detail))
        print(_format(criterion, check, passed, detail))
        return passed


def _format(criterion, check, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] {criterion} {check}"
    return f"{line}: {detail}" if detail else line


@pytest.fixture
def report():
    return AcceptanceReport()


def pytest_terminal_summary(terminalreporter):
    if not _CHECKS:
        return
    terminalreporter.section("acceptance checks")
    for row in _CHECKS:
        terminalreporter.write_line(_format(*row))
    terminalreporter.section("acceptance criteria")
    verdicts: dict[str, bool] = {}
    for criterion, _, passed, _ in _CHECKS:
        verdicts[criterion] = verdicts.get(criterion, True) and passed
    for criterion, passed in verdicts.items():
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {criterion}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tmp_files(tmp_path):
    """Write small distribution files and return their paths."""

    def write(name: str, values) -> str:
        path = tmp_path / name
        path.write_text("\n".join(repr(float(v)) for v in values) + "\n")
        return str(path)

    return write
