import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from eqrat.fileio import corpus_path, load  # noqa: E402


@pytest.fixture(scope="session")
def corpus():
    """Lazily loaded corpus diagrams keyed by file name."""
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load(corpus_path(name))
        return cache[name]
    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
