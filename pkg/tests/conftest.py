from __future__ import annotations

import pytest

from hecke_lowzeros.gaussian import PrimaryPrime
from hecke_lowzeros.lfunc import LEvaluator
from hecke_lowzeros.quadchar import HeckeChar


@pytest.fixture(scope="session")
def ev5() -> LEvaluator:
    """Evaluator for the smallest conductor, -1+2i, good to height 12."""
    return LEvaluator.build(HeckeChar(PrimaryPrime.of(-1, 2)), t_cap=12.0, afe_height=10.0)


@pytest.fixture(scope="session")
def ev_inert() -> LEvaluator:
    return LEvaluator.build(HeckeChar(PrimaryPrime.of(-7, 0)), t_cap=12.0, afe_height=10.0)


_CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion():
    """Record the outcome of one acceptance criterion for the end-of-run summary."""

    def record(number: int, passed: bool, detail: str) -> bool:
        _CRITERIA[number] = (bool(passed), detail)
        print(f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}")
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, detail = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
