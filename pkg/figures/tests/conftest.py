"""Shared fixture: generate simulator artifacts through the primary CLI.

The figures package consumes only the documented CSV/JSON files, so the
fixtures shell out to the `ringmotion` command instead of importing it.
"""

import subprocess
import sys
from pathlib import Path

import pytest


def run_primary(*args):
    proc = subprocess.run([sys.executable, "-m", "ringmotion.cli", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, f"ringmotion {' '.join(args)}: {proc.stderr}"
    return proc


@pytest.fixture(scope="session")
def artifacts(tmp_path_factory) -> Path:
    root = tmp_path_factory.mktemp("artifacts")
    for name in ("s1", "s2", "s3"):
        out = root / name
        run_primary("simulate", "--scenario", name, "--steps", "20000",
                    "--thin", "20", "--seed", "7", "--out", str(out))
        run_primary("acf", "--scenario", name, "--steps", "60000", "--thin", "50",
                    "--replicas", "2", "--max-lag-time", "10", "--seed", "7",
                    "--out", str(out))
        run_primary("analytic", "--scenario", name, "--steps", "20000",
                    "--out", str(out))
    # distribution artifacts only for the reference scenario (small, fast)
    proc = subprocess.run(
        [sys.executable, "-m", "ringmotion.cli", "dist", "--scenario", "s2",
         "--replicas", "4", "--samples-per-replica", "8", "--mc-samples", "4000",
         "--seed", "7", "--out", str(root / "s2")],
        capture_output=True, text=True)
    assert proc.returncode in (0, 1), proc.stderr  # tiny run; verdict may fail
    return root
