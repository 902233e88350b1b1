"""
Pytest configuration and shared fixtures.
"""

import pytest
import os
import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from spectral_pf import storage
from spectral_pf.mirrormap import build_mirror
from spectral_pf.ode import dos_equation


@pytest.fixture
def dos_ode():
    """Picard-Fuchs equation of the density of states."""
    return dos_equation()


@pytest.fixture(scope="session")
def mirror():
    """Mirror-map pipeline at the default order, built once per session."""
    return build_mirror(40)


@pytest.fixture
def memory_db():
    """Fresh in-memory ledger database."""
    db = storage.init_db("sqlite:///:memory:")
    yield db
    storage._db = None


@pytest.fixture
def mock_env_vars(monkeypatch, tmp_path):
    """Mock environment variables for testing."""
    for key in list(os.environ):
        if key.startswith("SPECTRAL_PF_"):
            monkeypatch.delenv(key)
    monkeypatch.setenv("SPECTRAL_PF_LOG_LEVEL", "ERROR")
    monkeypatch.setenv("SPECTRAL_PF_DB_PATH", f"sqlite:///{tmp_path / 'ledger.db'}")
    monkeypatch.chdir(tmp_path)
