import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from orbitconn import exact_linalg


@pytest.fixture(params=exact_linalg.available_backends())
def each_backend(request):
    with exact_linalg.use_backend(request.param):
        yield request.param


ACCEPTANCE: dict[int, tuple[str, bool]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, ok = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}")
