import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from opdeval import data, synth  # noqa: E402


@pytest.fixture(scope="session")
def small_gt():
    return synth.make_dataset(n_objects=4, frames_per_object=3, seed=7)


@pytest.fixture
def gt_file(tmp_path, small_gt):
    path = tmp_path / "gt.json"
    data.save_ground_truth(small_gt, path)
    return path


ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, title, ok, detail)``."""

    def record(number, title, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] AC{number:<2} {title}" + (f" ({detail})" if detail else "")
        request.config.stash[ACCEPTANCE_KEY].append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("AC")[1].split()[0])):
            terminalreporter.write_line(line)
