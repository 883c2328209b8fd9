from importlib.resources import files

import pytest

from greengap.config import CalibrationConfig
from greengap.engine import draw_population


@pytest.fixture(scope="session")
def default_config():
    return CalibrationConfig()


@pytest.fixture(scope="session")
def default_population(default_config):
    return draw_population(default_config)


@pytest.fixture(scope="session")
def audit_csv():
    return files("greengap") / "data" / "motor_audits_synthetic.csv"


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import REPORT

    if REPORT:
        terminalreporter.section("acceptance criteria")
        for number in sorted(REPORT):
            terminalreporter.write_line(REPORT[number])
