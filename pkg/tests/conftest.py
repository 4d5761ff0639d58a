import subprocess
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
CORPUS_DIR = REPO_ROOT / "src" / "edpm" / "corpus"
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
SHIM_DIR = REPO_ROOT / "shim"


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS_DIR


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES_DIR


@pytest.fixture(scope="session")
def shim_dir() -> Path:
    """The soft-backend runtime sources; builds the archive when make is available."""
    if not (SHIM_DIR / "edpm_shim.c").is_file():
        pytest.skip("shim runtime not present")
    subprocess.run(["make", "-C", str(SHIM_DIR), "libedpmshim.a"], capture_output=True)
    return SHIM_DIR
