import subprocess
import sys
from pathlib import Path

import pytest

REPO = Path(__file__).resolve().parents[2]
FIXTURES = REPO / "fixtures"


@pytest.fixture(scope="session")
def report_path(tmp_path_factory) -> Path:
    """Produce a report bundle by driving the pipeline CLI on the fixtures."""
    out = tmp_path_factory.mktemp("pipeline") / "out"
    subprocess.run(
        [
            sys.executable, "-m", "echomap.cli", "all",
            "--config", str(FIXTURES / "config.json"),
            "--output-dir", str(out),
        ],
        check=True,
    )
    return out / "report" / "report.json"
