import warnings
from pathlib import Path

import pytest

from mixedmoments.lfun import PreconditionWarning
from mixedmoments.maass import ingest_maass
from mixedmoments.modforms import hecke_eigenforms

DATA = Path(__file__).resolve().parent.parent / "data"

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def delta():
    return hecke_eigenforms(12)[0]


@pytest.fixture(scope="session")
def even_maass():
    return ingest_maass(DATA / "maass_even.txt")


@pytest.fixture(scope="session")
def odd_maass():
    return ingest_maass(DATA / "maass_odd.txt")


@pytest.fixture
def quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PreconditionWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        status, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {detail}")
