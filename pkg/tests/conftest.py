import pytest
from hypothesis import settings

from pidrate import kernel

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")


@pytest.fixture(params=sorted(kernel.BACKENDS))
def backend(request):
    return request.param


class AcceptanceLog:
    def __init__(self):
        self.lines = []

    def record(self, number, title, checks):
        """Log one criterion; ``checks`` maps a description to a bool."""
        ok = all(checks.values())
        failed = [name for name, passed in checks.items() if not passed]
        detail = "" if ok else f"  [failed: {'; '.join(failed)}]"
        self.lines.append(f"{'PASS' if ok else 'FAIL'}  criterion {number:>2}: {title}{detail}")
        return ok


_LOG = AcceptanceLog()


@pytest.fixture
def acceptance():
    return _LOG


def pytest_terminal_summary(terminalreporter):
    if _LOG.lines:
        terminalreporter.section("acceptance criteria")
        for line in _LOG.lines:
            terminalreporter.write_line(line)
