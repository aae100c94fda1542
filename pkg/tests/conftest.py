import re

import pytest

_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::.*test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[n] = (report.outcome, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        outcome, duration = _ACCEPTANCE[n]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:2d}: {verdict}  ({duration:.2f} s)")


@pytest.fixture(scope="session")
def s2_constants():
    from steinhaus_cert.jacobi import JacobiParams
    from steinhaus_cert.steinhaus import find_lemma_constants

    return find_lemma_constants(JacobiParams(0.0, 0.0))


@pytest.fixture(scope="session")
def s2_plan3(s2_constants):
    from steinhaus_cert.spaces import Family, SpaceKind
    from steinhaus_cert.steinhaus import generate_distances

    return generate_distances(SpaceKind(Family.SPHERE, 3), 3, s2_constants)
