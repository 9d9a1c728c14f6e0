import numpy as np
import pytest
from hypothesis import settings

# Derandomised so repeated runs exercise the same examples.
settings.register_profile("repo", deadline=None, derandomize=True, max_examples=60)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and item.name.startswith("test_criterion_"):
        details = [v for k, v in item.user_properties if k == "detail"]
        _ACCEPTANCE[item.name] = (rep.passed, details[0] if details else item.name)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda n: int(n.split("_")[2])):
        passed, detail = _ACCEPTANCE[name]
        if not detail.startswith("criterion"):
            detail = f"{name}: {'PASS' if passed else 'FAIL'} (no detail recorded)"
        terminalreporter.write_line(detail)
