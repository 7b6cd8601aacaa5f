"""Engine settings from YAML, the environment and command-line overrides."""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

logger = logging.getLogger(__name__)

PROJECT_ROOT = Path(__file__).resolve().parent.parent
ENV_PATH = PROJECT_ROOT / ".env"
DEFAULT_SETTINGS = PROJECT_ROOT / "config" / "example_settings.yaml"
LOCAL_SETTINGS = PROJECT_ROOT / "config" / "local_settings.yaml"

ENV_PREFIX = "QP_"


@dataclass(frozen=True)
class EngineSettings:
    max_table_k: int = 3
    oracle_max_dim: int = 6561
    threads: int = 0
    cache_dir: str = ".qp_cache"
    cache_enabled: bool = True
    log_level: str = "WARNING"
    search_depth: int = 12
    random_seed: int = 20240521

    @property
    def cache_path(self) -> Path:
        path = Path(self.cache_dir).expanduser()
        return path if path.is_absolute() else PROJECT_ROOT / path

    @property
    def workers(self) -> int:
        """Worker count with 0 meaning all available cores."""
        return self.threads if self.threads > 0 else (os.cpu_count() or 1)

    def with_overrides(self, **overrides: Any) -> "EngineSettings":
        values = {k: v for k, v in overrides.items() if v is not None}
        if not values:
            return self
        return replace(self, **_coerce_all(values, "overrides"))


_FIELD_TYPES = {f.name: f.type for f in fields(EngineSettings)}


def _load_env():
    # Load project .env if present; do not fail if missing.
    if ENV_PATH.exists():
        load_dotenv(dotenv_path=ENV_PATH, override=False)
    else:
        load_dotenv(override=False)


def _coerce(key: str, value: Any, source: str) -> Any:
    kind = _FIELD_TYPES.get(key)
    if kind is None:
        raise ValueError(f"unknown setting {key!r} in {source}")
    if kind in ("int", int):
        if isinstance(value, bool):
            raise ValueError(f"setting {key!r} in {source} must be an integer, got {value!r}")
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ValueError(f"setting {key!r} in {source} must be an integer, got {value!r}") from None
    if kind in ("bool", bool):
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"setting {key!r} in {source} must be a boolean, got {value!r}")
    return str(value)


def _coerce_all(values: Dict[str, Any], source: str) -> Dict[str, Any]:
    return {key: _coerce(key, value, source) for key, value in values.items()}


def _read_yaml(path: Path) -> Dict[str, Any]:
    data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise ValueError(f"settings file {path} must hold a mapping")
    flat: Dict[str, Any] = {}
    # Sections are for readers only; keys are unique across them.
    for key, value in data.items():
        if isinstance(value, dict):
            flat.update(value)
        else:
            flat[key] = value
    return _coerce_all(flat, str(path))


def _settings_file() -> Optional[Path]:
    # Allow override from env
    override = os.getenv("QP_SETTINGS_PATH")
    if override:
        return Path(override).expanduser()
    if LOCAL_SETTINGS.exists():
        return LOCAL_SETTINGS
    if DEFAULT_SETTINGS.exists():
        return DEFAULT_SETTINGS
    return None


def load_settings() -> EngineSettings:
    """Resolve settings: YAML file, then ``QP_*`` environment variables."""
    _load_env()
    values: Dict[str, Any] = {}
    path = _settings_file()
    if path is not None:
        values.update(_read_yaml(path))
    for name in _FIELD_TYPES:
        raw = os.getenv(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            values[name] = _coerce(name, raw, f"environment variable {ENV_PREFIX}{name.upper()}")
    settings = EngineSettings(**values)
    logger.debug("settings resolved from %s: %s", path, settings)
    return settings


_settings: Optional[EngineSettings] = None


def get_settings() -> EngineSettings:
    global _settings
    if _settings is None:
        _settings = load_settings()
    return _settings


def reset_settings() -> None:
    global _settings
    _settings = None


def apply_overrides(**overrides: Any) -> EngineSettings:
    """Layer command-line values over the loaded settings for this process."""
    global _settings
    _settings = get_settings().with_overrides(**overrides)
    return _settings
