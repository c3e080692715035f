"""
Process-wide settings, read from the environment.
"""

import os
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Mapping, Optional


@dataclass(frozen=True)
class Settings:
    """Caps and locations shared by the word, chain and CLI layers."""
    word_level_cap: int = 30
    index_level_cap: int = 90
    cache_dir: Optional[Path] = None
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> "Settings":
        """Build settings from ``FKQC_*`` environment variables."""
        env = os.environ if environ is None else environ
        cache = env.get("FKQC_CACHE_DIR")
        return cls(
            word_level_cap=int(env.get("FKQC_WORD_LEVEL_CAP", cls.word_level_cap)),
            index_level_cap=int(env.get("FKQC_INDEX_LEVEL_CAP", cls.index_level_cap)),
            cache_dir=Path(cache) if cache else None,
            log_level=env.get("FKQC_LOG_LEVEL", cls.log_level).upper(),
        )


_settings: Optional[Settings] = None


def get_settings() -> Settings:
    global _settings
    if _settings is None:
        _settings = Settings.from_env()
    return _settings


def configure(**overrides) -> Settings:
    """Replace individual settings; returns the new settings."""
    global _settings
    _settings = replace(get_settings(), **overrides)
    return _settings


def reset() -> None:
    global _settings
    _settings = None
