import pytest

CRITERIA = {
    1: "partition of unity",
    2: "Littlewood-Paley reconstruction",
    3: "coincidences",
    4: "exact dilation covariance",
    5: "closed-form oracles",
    6: "interpolation inequality",
    7: "band-limited Herz estimates",
    8: "low-pass smoothing slopes",
    9: "CKN scale invariance",
    10: "norm equivalences",
    11: "admissibility cases",
    12: "determinism",
}

_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion the test belongs to")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for k in getattr(report, "criteria", ()):
        ok = report.outcome == "passed"
        _outcomes.setdefault(k, []).append((report.nodeid, ok))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    rep.criteria = tuple(m.args[0] for m in item.iter_markers("criterion"))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k, title in CRITERIA.items():
        runs = _outcomes.get(k)
        if not runs:
            tr.write_line(f"criterion {k:2d} {title}: NOT RUN")
            continue
        failed = [nid for nid, ok in runs if not ok]
        status = "PASS" if not failed else "FAIL"
        tr.write_line(f"criterion {k:2d} {title}: {status} ({len(runs) - len(failed)}/{len(runs)} tests)")
