import numpy as np
import pytest

ACCEPTANCE_LINES: list[str] = []


def cn(rng, *shape):
    """CN(0, 1) samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def report():
    """Record one acceptance line; printed in the terminal summary."""

    def _report(criterion: str, ok: bool, detail: str = "") -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}" + (f": {detail}" if detail else ""))

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
