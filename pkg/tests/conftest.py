import pytest

import hcatenoid as hc


@pytest.fixture(scope="session")
def cat_minimal():
    """Zero prescription, necksize 1, integrated to 1e6."""
    return hc.integrate_catenoid(hc.minimal(), 1.0, hc.IntegratorConfig(x_max=1e6))


@pytest.fixture(scope="session")
def cat_h2():
    return hc.integrate_catenoid(hc.power_law(2), 1.0, hc.IntegratorConfig(x_max=1e6))


@pytest.fixture(scope="session")
def cat_h15():
    return hc.integrate_catenoid(hc.power_law(1.5), 1.0, hc.IntegratorConfig(x_max=1e6))


@pytest.fixture(scope="session")
def cat_h3():
    return hc.integrate_catenoid(hc.power_law(3), 1.0, hc.IntegratorConfig(x_max=1e6))


_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        _ACCEPTANCE.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance checks")
    for name, outcome in _ACCEPTANCE:
        label = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{label}  {name}")
