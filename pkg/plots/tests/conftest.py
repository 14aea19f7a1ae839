"""Produce canonical logs through the mmdplan CLI, the documented interface."""

import subprocess
import sys
from pathlib import Path

import pytest


def run_cli(*args: str):
    result = subprocess.run(
        [sys.executable, "-m", "mmdplan.cli", *args],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0, result.stderr
    return result


@pytest.fixture(scope="session")
def log_dir(tmp_path_factory) -> Path:
    """Canonical scenario outputs: run logs, a sweep CSV, a surface dump."""
    base = tmp_path_factory.mktemp("logs")
    run_cli("run", "--scenario", "five_obstacles", "--out", str(base / "five"))
    run_cli("run", "--scenario", "corridor", "--out", str(base / "corridor"))
    run_cli(
        "ablate", "--scenario", "head_on", "--degrees", "1,3", "--seeds", "2",
        "--out", str(base),
    )
    run_cli(
        "surface", "--scenario", "five_obstacles", "--step", "2",
        "--out", str(base / "surface.tsv"),
    )
    return base


@pytest.fixture(scope="session")
def five_log(log_dir) -> Path:
    return log_dir / "five" / "run.json"


@pytest.fixture(scope="session")
def corridor_log(log_dir) -> Path:
    return log_dir / "corridor" / "run.json"


@pytest.fixture(scope="session")
def metrics_csv(log_dir) -> Path:
    return log_dir / "ablation.csv"


@pytest.fixture(scope="session")
def single_row_csv(log_dir) -> Path:
    return log_dir / "five" / "metrics.csv"


@pytest.fixture(scope="session")
def surface_table(log_dir) -> Path:
    return log_dir / "surface.tsv"
