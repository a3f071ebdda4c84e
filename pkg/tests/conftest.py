import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.outcome != "passed":
        status = {"passed": "PASS", "failed": "FAIL"}.get(report.outcome, report.outcome.upper())
        doc = _results.get(n, ("", ""))[1]
        _results[n] = (status, doc)


def pytest_collection_modifyitems(items):
    for item in items:
        m = _CRITERION.search(item.nodeid)
        if m:
            doc = (item.function.__doc__ or "").strip().splitlines()[0]
            _results.setdefault(int(m.group(1)), ("NOT RUN", doc))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, doc = _results[n]
        terminalreporter.write_line(f"criterion {n}: {status:7s} {doc}")
