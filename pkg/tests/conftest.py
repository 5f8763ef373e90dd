import pathlib
import sys

import pytest

from treetriples import data_path, read_ptb

sys.path.insert(0, str(pathlib.Path(__file__).parent))

FIXTURES = pathlib.Path(__file__).parent / "fixtures"

EXAMPLE_TRIPLES = [
    ("The principal opposition parties", "boycotted", "the polls"),
    ("The principal opposition parties", "boycotted", "the polls after accusations"),
    ("The principal opposition parties", "boycotted",
     "the polls after accusations of vote rigging"),
    ("the only other name on the ballot", "was", "a little known challenger"),
    ("the only other name on the ballot", "was",
     "a little known challenger from a marginal political party"),
]


@pytest.fixture(scope="session")
def example_path():
    return data_path("example_sentence.ptb")


@pytest.fixture(scope="session")
def corpus_path():
    return data_path("sample_corpus.ptb")


@pytest.fixture
def example_tree(example_path):
    with open(example_path, encoding="utf-8") as fh:
        (tree,) = read_ptb(fh)
    return tree


@pytest.fixture(scope="session")
def sample_trees(corpus_path):
    with open(corpus_path, encoding="utf-8") as fh:
        return read_ptb(fh)


ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None and report.when == "call":
        name = marker.args[0]
        callspec = getattr(item, "callspec", None)
        if callspec is not None:
            name = f"{name} [{callspec.id}]"
        ACCEPTANCE_RESULTS.append((name, report.passed))


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
