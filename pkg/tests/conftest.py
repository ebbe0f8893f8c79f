import shutil
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

FIXTURE_DIR = Path(__file__).parent.parent / "fixtures" / "demo"

# acceptance criteria results, printed in the terminal summary
_ACCEPTANCE: dict[str, bool] = {}


def record_acceptance(name: str, ok: bool = True) -> None:
    _ACCEPTANCE[name] = ok


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        status = "PASS" if _ACCEPTANCE[name] else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")


@pytest.fixture
def demo_dir(tmp_path):
    """A throwaway copy of the shipped demo project tree."""
    target = tmp_path / "demo"
    shutil.copytree(FIXTURE_DIR, target)
    return target


@pytest.fixture
def demo_project(demo_dir):
    from spdetect import corpus

    return corpus.load_project(demo_dir)
