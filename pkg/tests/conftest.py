import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def lex_combinations(n, k):
    """Brute-force oracle: every k-subset of {1..n} via bitmasks, sorted."""
    out = []
    for mask in range(1 << n):
        if bin(mask).count("1") == k:
            out.append(tuple(i + 1 for i in range(n) if mask >> i & 1))
    return sorted(out)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; the line is printed in the terminal summary."""

    def _report(criterion, ok, detail):
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
