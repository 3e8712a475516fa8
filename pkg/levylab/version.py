"""Tool version for ``--version`` and report provenance."""

from __future__ import annotations

import importlib.metadata
import re
from functools import lru_cache
from pathlib import Path
from typing import Optional

DISTRIBUTION = "levylab"
_UNKNOWN = "0.0.0+unknown"

_PROJECT_TABLE = re.compile(r"^\[project\][ \t]*$(?P<body>.*?)(?=^\[|\Z)", re.M | re.S)
_VERSION_LINE = re.compile(r"^\s*version\s*=\s*([\"'])(?P<version>[^\"']+)\1\s*$", re.M)


def _checkout_pyproject() -> Optional[Path]:
    candidate = Path(__file__).resolve().parent.parent / "pyproject.toml"
    return candidate if candidate.is_file() else None


def _checkout_version(pyproject: Path) -> Optional[str]:
    text = pyproject.read_text(encoding="utf-8")
    try:
        import tomllib
    except ModuleNotFoundError:  # Python 3.10
        table = _PROJECT_TABLE.search(text)
        line = _VERSION_LINE.search(table.group("body")) if table else None
        return line.group("version").strip() if line else None
    project = tomllib.loads(text).get("project", {})
    if project.get("name") != DISTRIBUTION:
        return None
    version = project.get("version")
    return version.strip() if isinstance(version, str) and version.strip() else None


@lru_cache(maxsize=1)
def get_version() -> str:
    """Installed metadata first, then [project].version of a source checkout. Never raises."""
    try:
        return importlib.metadata.version(DISTRIBUTION)
    except importlib.metadata.PackageNotFoundError:
        pass
    pyproject = _checkout_pyproject()
    if pyproject is None:
        return _UNKNOWN
    try:
        return _checkout_version(pyproject) or _UNKNOWN
    except (OSError, ValueError):
        return _UNKNOWN
