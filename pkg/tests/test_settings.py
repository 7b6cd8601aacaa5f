import pytest

from core.settings import (
    PROJECT_ROOT,
    EngineSettings,
    apply_overrides,
    get_settings,
    load_settings,
    reset_settings,
)


def test_defaults_from_bundled_yaml():
    settings = load_settings()
    assert settings.max_table_k == 3
    assert settings.search_depth == 12
    assert settings.cache_enabled is True
    assert settings.oracle_max_dim == 9 ** 4 == EngineSettings().oracle_max_dim


def test_yaml_file_from_environment(tmp_path, monkeypatch):
    path = tmp_path / "settings.yaml"
    path.write_text("tables:\n  max_table_k: 2\nruntime:\n  threads: 3\n", encoding="utf-8")
    monkeypatch.setenv("QP_SETTINGS_PATH", str(path))
    settings = load_settings()
    assert settings.max_table_k == 2
    assert settings.workers == 3


def test_environment_beats_yaml(monkeypatch):
    monkeypatch.setenv("QP_THREADS", "5")
    monkeypatch.setenv("QP_CACHE_ENABLED", "off")
    settings = load_settings()
    assert settings.threads == 5
    assert settings.cache_enabled is False


def test_bad_values(tmp_path, monkeypatch):
    monkeypatch.setenv("QP_THREADS", "many")
    with pytest.raises(ValueError, match="QP_THREADS"):
        load_settings()
    monkeypatch.delenv("QP_THREADS")
    path = tmp_path / "settings.yaml"
    path.write_text("colour: blue\n", encoding="utf-8")
    monkeypatch.setenv("QP_SETTINGS_PATH", str(path))
    with pytest.raises(ValueError, match="unknown setting"):
        load_settings()
    path.write_text("- 1\n- 2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="mapping"):
        load_settings()


def test_overrides_skip_none():
    base = EngineSettings()
    assert base.with_overrides(threads=None) is base
    changed = base.with_overrides(threads="2", log_level="info")
    assert changed.threads == 2
    assert changed.log_level == "info"
    with pytest.raises(ValueError):
        base.with_overrides(bogus=1)


def test_apply_overrides_is_process_wide():
    apply_overrides(max_table_k=2)
    assert get_settings().max_table_k == 2
    reset_settings()
    assert get_settings().max_table_k == 3


def test_relative_cache_dir_resolves_against_project():
    assert EngineSettings(cache_dir="tables").cache_path == PROJECT_ROOT / "tables"
