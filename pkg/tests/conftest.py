import pytest

from headsplat.assets import generate_synthetic_fixture

# name -> "PASS" | "FAIL", filled by the acceptance suite via the report hook
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture(scope="session")
def fixture64():
    return generate_synthetic_fixture(7, 64)


@pytest.fixture(scope="session")
def model64(fixture64):
    return fixture64[0]


@pytest.fixture(scope="session")
def asset64(fixture64):
    return fixture64[1]


@pytest.fixture(scope="session")
def fixture256():
    return generate_synthetic_fixture(7, 256)


@pytest.fixture(scope="session")
def fixture512():
    return generate_synthetic_fixture(7, 512)


@pytest.fixture(scope="session")
def asset_file64(fixture64, tmp_path_factory):
    from headsplat.assets import save_asset

    path = tmp_path_factory.mktemp("assets") / "fixture64.agav"
    save_asset(path, fixture64[1])
    return path


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    if call.when == "call" and item.module.__name__ == "test_acceptance":
        label = getattr(item.function, "acceptance_label", None)
        if label is not None:
            outcome = "PASS"
            if report.failed:
                outcome = "FAIL"
            elif report.skipped:
                outcome = "SKIP"
            ACCEPTANCE_RESULTS[label] = outcome
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in ACCEPTANCE_RESULTS.items():
        terminalreporter.write_line(f"{outcome:4s}  {label}")
