"""Rewrite tests/golden/<fixture>/ from a fresh ``eventcurve all`` run.

Only run after an intentional change to outputs; review the diff before
committing.
"""

import shutil
import sys
import tempfile
from pathlib import Path

from eventcurve.cli import main

ROOT = Path(__file__).resolve().parents[1]

for name in ("demo", "small"):
    with tempfile.TemporaryDirectory() as tmp:
        code = main(["all", "--config", str(ROOT / "fixtures" / name / "run.cfg"), "--output", tmp])
        if code != 0:
            sys.exit(f"{name}: eventcurve exited with {code}")
        dest = ROOT / "tests" / "golden" / name
        if dest.exists():
            shutil.rmtree(dest)
        shutil.copytree(tmp, dest)
        print("refreshed", dest)
