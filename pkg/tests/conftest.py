import pytest

from _helpers import make_dataset


@pytest.fixture
def toy():
    cols = {"A": ["a", "a", "a", "b"], "B": ["x", "x", "y", "y"]}
    return make_dataset(cols, {"A": "categorical", "B": "categorical"})


def pytest_terminal_summary(terminalreporter):
    from _helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
