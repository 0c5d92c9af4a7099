import pytest

CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion."""
    entry = {"detail": ""}

    def record(number, title, detail=""):
        entry.update(number=number, title=title, detail=detail)

    yield record
    if "number" in entry:
        rep = getattr(request.node, "rep_call", None)
        passed = rep is not None and rep.passed
        CRITERIA[entry["number"]] = (passed, entry["title"], entry["detail"])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, title, detail = CRITERIA[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}"
        if detail:
            line += f" -- {detail}"
        terminalreporter.write_line(line)
