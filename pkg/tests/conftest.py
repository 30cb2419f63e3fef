import pytest

CRITERIA = {
    1: "fixed-center probability",
    2: "ambiguity reproduction",
    3: "Q(mu) factor",
    4: "gas kernel vs Monte Carlo",
    5: "rest-atom total",
    6: "temperature scaling",
    7: "hemisphere asymptotics",
    8: "packet suite",
    9: "impact-parameter independence",
    10: "quantization invariance",
    11: "divergence probe",
}

_outcomes: dict[int, list[tuple[str, str]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _outcomes.setdefault(crit, []).append((report.nodeid, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        results = _outcomes.get(n)
        if not results:
            status = "NOT RUN"
        elif all(o == "passed" for _, o in results):
            status = "PASS"
        else:
            status = "FAIL"
        failed = [nid.split("::")[-1] for nid, o in results or [] if o != "passed"]
        extra = f"  (failed: {', '.join(failed)})" if failed else ""
        terminalreporter.write_line(f"criterion {n:2d} {CRITERIA[n]:<32s} {status}{extra}")
