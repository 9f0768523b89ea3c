import time

import pytest

LIMIT_SECONDS = 60.0
_LINES = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.call_passed = rep.passed


class Criterion:
    def __init__(self):
        self.start = time.perf_counter()
        self.label = None
        self.details = []

    def __call__(self, number, title):
        self.number, self.label = number, title
        return self

    def note(self, text):
        self.details.append(text)

    def elapsed(self):
        return time.perf_counter() - self.start

    def within_budget(self):
        assert self.elapsed() < LIMIT_SECONDS, f"took {self.elapsed():.1f}s"


@pytest.fixture
def criterion(request):
    """Collects one PASS/FAIL line per acceptance criterion for the terminal summary."""
    rec = Criterion()
    yield rec
    if rec.label:
        status = "PASS" if getattr(request.node, "call_passed", False) else "FAIL"
        extra = "; ".join(rec.details)
        _LINES.append((rec.number, f"{status}  criterion {rec.number:>2}: {rec.label} [{rec.elapsed():.1f}s]"
                       + (f"  {extra}" if extra else "")))


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
