"""Bundled example graphs and matrices.

Set FEYNMAT_FIXTURES to a directory to load fixtures from there instead.
"""

from __future__ import annotations

import os
from importlib import resources
from pathlib import Path

from .errors import DomainError
from .graph import FeynGraph
from .linalg import ExactMatrix, parse_matrix

ENV_VAR = "FEYNMAT_FIXTURES"


def fixture_dir() -> Path:
    override = os.environ.get(ENV_VAR)
    if override:
        return Path(override)
    return Path(str(resources.files("feynmat") / "data"))


def _read(name: str, suffix: str) -> str:
    path = fixture_dir() / (name if name.endswith(suffix) else name + suffix)
    if not path.is_file():
        raise DomainError(f"no fixture {path.name!r} in {path.parent}")
    return path.read_text()


def load_fixture(name: str) -> FeynGraph:
    """A bundled graph: 'dunce_cap', 'big_example' or 'k33'."""
    return FeynGraph.from_json(_read(name, ".json"))


def load_matrix(name: str, field: str = "Q") -> ExactMatrix:
    """A bundled matrix literal, e.g. 'big_matrix', 'k33_reduced', 'u24'."""
    return parse_matrix(_read(name, ".txt"), field)


def available() -> list[str]:
    return sorted(p.name for p in fixture_dir().iterdir() if p.suffix in (".json", ".txt"))
