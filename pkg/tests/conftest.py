from pathlib import Path

import pytest

from topicid.corpus import load_lemma_map, parse_corpus

FIXTURES = Path(__file__).parent / "fixtures"
TRAIN_FIXTURES = ["synthetic5.txt", "tiny3.txt", "mixed4.txt"]

_criteria: dict[int, tuple[str, list[str]]] = {}


def load_fixture(name, lemmas=True):
    lemma_map = None
    if lemmas:
        with open(FIXTURES / "lemmas.tsv", encoding="utf-8") as f:
            lemma_map = load_lemma_map(f)
    with open(FIXTURES / name, encoding="utf-8") as f:
        return parse_corpus(f, lemmas=lemma_map)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture(params=TRAIN_FIXTURES)
def fixture_corpus(request):
    return load_fixture(request.param)


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance", None)
    if marker is None:
        return
    number, title = marker
    outcomes = _criteria.setdefault(number, (title, []))[1]
    if report.when == "call" or report.outcome != "passed":
        outcomes.append(report.outcome)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().acceptance = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, outcomes = _criteria[number]
        if any(o == "failed" for o in outcomes):
            verdict = "FAIL"
        elif outcomes and all(o == "skipped" for o in outcomes):
            verdict = "SKIP"
        else:
            verdict = "PASS"
        terminalreporter.write_line(f"criterion {number}: {verdict}  {title}")
