import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "workbench", deadline=None, max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "30")),
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("workbench")

ROOT = Path(__file__).resolve().parents[1]
FINITE = ROOT / "corpus" / "finite"
MANIFESTS = ROOT / "corpus" / "manifests"


@pytest.fixture(scope="session")
def finite_corpus():
    if not (FINITE / "pair2.json").exists():
        import subprocess
        import sys

        subprocess.run([sys.executable, str(ROOT / "scripts" / "make_corpus.py"), "--out", str(FINITE)], check=True)
    return FINITE


@pytest.fixture(scope="session")
def manifest_dir():
    return MANIFESTS


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
