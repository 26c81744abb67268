"""Runtime configuration: defaults, an optional TOML file, and environment
overrides, in increasing precedence (env > file > defaults).

Environment variables are SATFORGE_<FIELD> (upper-cased field name).
"""

from __future__ import annotations

import os

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from dataclasses import dataclass, fields
from pathlib import Path

ENV_PREFIX = "SATFORGE_"


@dataclass
class ServiceConfig:
    data_dir: str = "./satforge-data"
    checkpoint_dir: str = "./satforge-data/checkpoints"
    tile_size: int = 256
    checkpoint_cache_size: int = 2
    host: str = "127.0.0.1"
    port: int = 8000
    ui_dir: str = "./frontend/dist"

    def ensure_dirs(self) -> None:
        Path(self.data_dir).mkdir(parents=True, exist_ok=True)
        Path(self.checkpoint_dir).mkdir(parents=True, exist_ok=True)


def load_config(path: str | Path | None = None, env: dict | None = None) -> ServiceConfig:
    """Build a ServiceConfig; a missing file path is an error, no file at
    all is fine (defaults + env only)."""
    env = os.environ if env is None else env
    values: dict = {}

    if path is not None:
        data = tomllib.loads(Path(path).read_text())
        values.update(data.get("satforge", data))

    for f in fields(ServiceConfig):
        raw = env.get(ENV_PREFIX + f.name.upper())
        if raw is not None:
            values[f.name] = _coerce(raw, f.default)

    known = {f.name for f in fields(ServiceConfig)}
    values = {k: v for k, v in values.items() if k in known}
    return ServiceConfig(**values)


def _coerce(raw: str, default):
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    return raw
