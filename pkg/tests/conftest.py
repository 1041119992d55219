import os
import sys
from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("thorough", max_examples=400, deadline=None)
if os.environ.get("HYPOTHESIS_PROFILE"):
    settings.load_profile(os.environ["HYPOTHESIS_PROFILE"])

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES: dict[str, str] = {}


@pytest.fixture
def report():
    """Record one acceptance line: ``report("AC3", passed, "detail")``."""

    def _record(key: str, passed: bool, detail: str) -> None:
        ACCEPTANCE_LINES[key] = f"{key:<5} {'PASS' if passed else 'FAIL'}  {detail}"

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k[2:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
