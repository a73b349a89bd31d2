import os
import sys
from pathlib import Path

import pytest

_MODULE_DIR = os.environ.get("IRSEVO_PYTHON_DIR")
if _MODULE_DIR:
    sys.path.insert(0, _MODULE_DIR)
else:
    # fall back to an in-tree build
    root = Path(__file__).resolve().parents[2]
    sys.path.insert(0, str(root / "build" / "python"))


def source_dir() -> Path:
    env = os.environ.get("IRSEVO_SOURCE_DIR")
    return Path(env) if env else Path(__file__).resolve().parents[2]


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return source_dir() / "scenarios"
