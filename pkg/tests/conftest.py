import os

import pytest
from hypothesis import HealthCheck, settings

from collatz_flows import REFERENCE_PAIRS

settings.register_profile("default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(params=REFERENCE_PAIRS, ids=lambda p: f"a{p.alpha}b{p.beta}")
def params(request):
    return request.param


ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def record_criterion():
    """Store one summary line per acceptance criterion for the terminal report."""

    def record(number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE[number] = line
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
