"""Flat key = value run configuration files.

The format is the top level of TOML with no tables::

    domain = "fq"
    q = 2
    forms = "f, f+t^2+t"
    d0 = 5

Keys are flag names with dashes or underscores. Command-line flags win over
the file.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

import tomli


class ConfigError(ValueError):
    pass


def parse_config(text: str) -> dict[str, Any]:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"bad config: {exc}") from exc
    out = {}
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(f"tables are not allowed (found [{key}])")
        if isinstance(value, list) and any(isinstance(v, dict) for v in value):
            raise ConfigError(f"arrays of tables are not allowed ({key})")
        out[key.replace("-", "_")] = value
    return out


def load_config(path: str | Path) -> dict[str, Any]:
    return parse_config(Path(path).read_text())
