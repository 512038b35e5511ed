import re

_CRITERIA: dict[int, list[str]] = {}
_TITLES = {
    1: "oracle ring soundness",
    2: "lattice-sum suite for n = 3",
    3: "constant-term characters and theta Taylor identities",
    4: "MLDE suite",
    5: "cross-formula consistency",
    6: "psl/osp suite",
    7: "harness",
}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA.setdefault(int(m.group(1)), []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_TITLES):
        outcomes = _CRITERIA.get(k)
        if outcomes is None:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {k}: {status:<7} {_TITLES[k]}")
