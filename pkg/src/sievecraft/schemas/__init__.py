"""Versioned JSON Schema documents for every CLI output."""

from __future__ import annotations

import json
from importlib import resources

SCHEMA_VERSION = 1


def load_schema(name: str) -> dict:
    return json.loads(resources.files(__name__).joinpath(f"{name}.schema.json").read_text())


def schema_names() -> list[str]:
    return sorted(p.name[: -len(".schema.json")] for p in resources.files(__name__).iterdir()
                  if p.name.endswith(".schema.json"))
