import pytest

from core.settings import reset_settings


@pytest.fixture(autouse=True)
def isolated_settings(tmp_path, monkeypatch):
    """Point the structure cache at a scratch directory and reload settings."""
    monkeypatch.setenv("QP_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("QP_SETTINGS_PATH", raising=False)
    reset_settings()
    yield
    reset_settings()
