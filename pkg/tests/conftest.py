import pytest

from succinctxml import XmlIndex, parse_document

EX1 = b"<a><b/><c>x</c></a>"


@pytest.fixture
def ex1_index():
    return XmlIndex.build(EX1)


@pytest.fixture
def ex1_model():
    return parse_document(EX1)


_CRITERIA_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")
    config.stash[_CRITERIA_KEY] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = mark.args
        detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
        item.config.stash[_CRITERIA_KEY][number] = (title, report.outcome, report.duration, detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_CRITERIA_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, outcome, duration, detail = results[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        line = f"criterion {number}: {verdict}  {title}  [{duration:.1f}s]"
        if detail:
            line += f"  {detail}"
        terminalreporter.write_line(line)
