import pytest

_RESULTS = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    notes = [v for k, v in item.user_properties if k == "note"]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        if rep.passed:
            status = "PASS"
        elif rep.skipped:
            status = "SKIP"
        else:
            status = "FAIL"
        _RESULTS[num] = (status, title, "; ".join(notes))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_RESULTS):
        status, title, note = _RESULTS[num]
        line = f"criterion {num:2d}  {status}  {title}"
        tr.write_line(line + (f"  [{note}]" if note else ""))
