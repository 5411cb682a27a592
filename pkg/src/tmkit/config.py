"""Layered runtime configuration.

Precedence: flags > environment variables (prefix TMK_) > config file
`tmk.toml-style key=value` > defaults. The config file is a flat list of
`key = value` lines; `#` starts a comment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

DEFAULT_CONFIG_FILE = "tmk.toml"

ENV_KEYS = {
    "client_endpoint": "TMK_CLIENT_ENDPOINT",
    "client_key": "TMK_CLIENT_KEY",
    "output_dir": "TMK_OUTPUT_DIR",
    "alignment_threshold": "TMK_ALIGNMENT_THRESHOLD",
    "max_repairs": "TMK_MAX_REPAIRS",
    "strict_eval": "TMK_STRICT_EVAL",
}


@dataclass(frozen=True)
class ToolConfig:
    client_endpoint: str | None = None
    client_key: str | None = None
    output_dir: str = "."
    alignment_threshold: float = 0.8
    max_repairs: int = 2
    strict_eval: bool = False


def _parse_config_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or "=" not in line:
            continue
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip().strip("'\"")
    return values


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key == "alignment_threshold":
        return float(value)
    if key == "max_repairs":
        return int(value)
    if key == "strict_eval":
        if isinstance(value, bool):
            return value
        return str(value).lower() in ("1", "true", "yes", "on")
    return str(value)


def resolve_config(
    flags: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    config_file: str | Path | None = None,
) -> ToolConfig:
    """Merges the configuration layers; `flags` entries of None are unset."""
    env = os.environ if env is None else env
    merged: dict[str, Any] = {}

    path = Path(config_file) if config_file else Path(DEFAULT_CONFIG_FILE)
    if path.is_file():
        file_values = _parse_config_file(path)
        for key in ENV_KEYS:
            if key in file_values:
                merged[key] = file_values[key]

    for key, env_key in ENV_KEYS.items():
        if env_key in env:
            merged[key] = env[env_key]

    for key, value in (flags or {}).items():
        if value is not None:
            merged[key] = value

    resolved = {key: _coerce(key, value) for key, value in merged.items()}
    config = ToolConfig(**{**ToolConfig().__dict__, **resolved})
    if not 0 < config.alignment_threshold <= 1:
        raise ValueError(
            f"alignment threshold must be in (0, 1], got {config.alignment_threshold}"
        )
    return config
