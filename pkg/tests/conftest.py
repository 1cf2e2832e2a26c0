import numpy as np
import pytest

from ris_secrecy.channel import LinkBudget
from ris_secrecy.geometry import Scene


@pytest.fixture
def scene():
    return Scene.default()


@pytest.fixture
def lb():
    return LinkBudget()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def p_opt():
    return np.array([4.88, 4.92, 2.1])


# one summary line per acceptance criterion, printed after the run
_CRITERIA: dict[int, tuple[str, bool, str]] = {}


@pytest.fixture
def criterion():
    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        _CRITERIA[number] = (title, bool(passed), detail)
        print(f"criterion {number:2d} [{'PASS' if passed else 'FAIL'}] {title}: {detail}")
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k:2d} [{'PASS' if ok else 'FAIL'}] {title}: {detail}")
