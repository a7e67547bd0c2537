import numpy as np
import pytest

from trustchain.consensus import NodeDescriptor

_ACCEPTANCE_LINES = []


def record_criterion(name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def four_nodes():
    return (
        NodeDescriptor("a", 1.0, 0.9),
        NodeDescriptor("b", 2.0, 0.8),
        NodeDescriptor("c", 3.0, 0.95),
        NodeDescriptor("d", 4.0, 0.6),
    )
