"""Service configuration: defaults, config file, environment, flag overrides.

Precedence, lowest to highest: built-in defaults, config file (ASCII
``key=value`` lines), ``RACLIB_*`` environment variables, explicit flags.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "RACLIB_"

_INT_KEYS = {"record_size", "port", "bucket_ttl_seconds", "bucket_width_seconds"}
_PATH_KEYS = {"library_dir", "cache_root"}


@dataclass
class Config:
    library_dir: Path = Path("library")
    cache_root: Path = Path("cache")
    record_size: int = 1024
    port: int = 8080
    bucket_ttl_seconds: int = 2000
    bucket_width_seconds: int = 1000

    def validate(self) -> "Config":
        if self.record_size < 1:
            raise ValueError(f"record_size must be >= 1, got {self.record_size}")
        if self.bucket_ttl_seconds < self.bucket_width_seconds:
            raise ValueError(
                f"bucket_ttl_seconds {self.bucket_ttl_seconds} shorter than "
                f"bucket_width_seconds {self.bucket_width_seconds}"
            )
        if not 0 < self.port < 65536:
            raise ValueError(f"port out of range: {self.port}")
        return self


def _coerce(key: str, value) -> object:
    if key in _INT_KEYS:
        return int(value)
    if key in _PATH_KEYS:
        return Path(value)
    raise ValueError(f"unknown config key: {key}")


def _parse_file(path: Path) -> dict:
    values = {}
    for lineno, line in enumerate(path.read_text("ascii").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        values[key.strip()] = _coerce(key.strip(), value.strip())
    return values


def load_config(config_file: str | Path | None = None, env=None, **overrides) -> Config:
    """Merge defaults, file, environment, and keyword overrides (None skipped)."""
    if env is None:
        env = os.environ
    values: dict = {}
    if config_file is not None:
        values.update(_parse_file(Path(config_file)))
    for field in fields(Config):
        env_value = env.get(ENV_PREFIX + field.name.upper())
        if env_value is not None:
            values[field.name] = _coerce(field.name, env_value)
    for key, value in overrides.items():
        if value is not None:
            values[key] = _coerce(key, value)
    return Config(**values).validate()
