import pytest

from helpers import ACCEPTANCE, CORPUS, program


@pytest.fixture(scope="session")
def corpus():
    return {name: program(name) for name in CORPUS}


@pytest.fixture(scope="session")
def listnat():
    return program("listnat")


@pytest.fixture(scope="session")
def listnat_plus():
    return program("listnat_plus")


@pytest.fixture(scope="session")
def gc():
    return program("gc")


@pytest.fixture(scope="session")
def bad():
    return program("bad")


@pytest.fixture(scope="session")
def abcd():
    return program("ground_abcd")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, title, seconds = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {number:>2}. {title}  ({seconds:.2f}s)")
