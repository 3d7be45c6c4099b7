"""Layered configuration: project `.env` file, YAML config files and flag overrides."""
from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from dotenv import dotenv_values
from ruamel.yaml import YAML
from ruamel.yaml.error import YAMLError

ENV_PREFIX = "LEDPOSE_"

_yaml = YAML(typ="safe")
_yaml.default_flow_style = False


@dataclass(frozen=True, slots=True)
class EnvLoadResult:
    """Resolved environment data for a project directory."""

    values: dict[str, str]
    file: Path | None
    applied: list[str]


class EnvLoader:
    """Load a project-local `.env` file holding ``LEDPOSE_*`` defaults."""

    def __init__(
        self,
        project_dir: Path,
        *,
        filename: str | os.PathLike[str] = ".env",
        prefix: str = ENV_PREFIX,
        base_env: Mapping[str, str] | None = None,
    ) -> None:
        self.project_dir = Path(project_dir).resolve()
        self.prefix = prefix
        self.base_env = dict(base_env) if base_env is not None else dict(os.environ)

        filename_path = Path(filename)
        if not filename_path.is_absolute():
            filename_path = self.project_dir / filename_path
        self.env_path = filename_path

    def load(self) -> EnvLoadResult:
        if not self.env_path.is_file():
            return EnvLoadResult(values=dict(self.base_env), file=None, applied=[])

        file_values = {k: v for k, v in dotenv_values(self.env_path).items() if k.startswith(self.prefix)}
        merged = merge_env_dicts((file_values,), existing=self.base_env)
        applied = [k for k in file_values if k not in self.base_env and file_values[k] is not None]
        return EnvLoadResult(values=merged, file=self.env_path, applied=applied)


def merge_env_dicts(dicts: Iterable[Mapping[str, str | None]], *, existing: Mapping[str, str]) -> dict[str, str]:
    """Merge dotenv dictionaries without overriding explicit environment variables."""

    merged: dict[str, str] = {}
    for data in dicts:
        for key, value in data.items():
            if key in existing or value is None:
                continue
            merged[key] = value
    merged.update(existing)
    return merged


def find_project_dir(start: str | os.PathLike[str] | None = None, *, marker: str = ".env") -> Path:
    """Walk up from ``start`` to the directory holding ``marker``, else the nearest ``pyproject.toml``.

    Falls back to ``start`` itself when neither marker exists, so tools keep
    working from arbitrary data directories.
    """

    current = Path(start or Path.cwd()).resolve()
    if current.is_file():
        current = current.parent

    fallback: Path | None = None
    for directory in [current, *current.parents]:
        if marker and (directory / marker).exists():
            return directory
        if fallback is None and (directory / "pyproject.toml").exists():
            fallback = directory
    return fallback if fallback is not None else current


def bootstrap_env(
    *,
    project_dir: Path | None = None,
    filename: str | os.PathLike[str] = ".env",
    base_env: Mapping[str, str] | None = None,
) -> EnvLoadResult:
    """Load the project `.env` and apply its ``LEDPOSE_*`` keys that are not already set."""

    loader = EnvLoader(project_dir or find_project_dir(), filename=filename, base_env=base_env)
    result = loader.load()
    for key in result.applied:
        os.environ[key] = result.values[key]
    return result


def load_config_file(path: str | os.PathLike[str]) -> dict[str, Any]:
    """Read a YAML mapping. An empty file yields an empty mapping."""

    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"Config file not found: {p}")
    try:
        with open(p, encoding="utf-8") as f:
            data = _yaml.load(f)
    except YAMLError as e:
        raise ValueError(f"Config file {p} is not valid YAML: {e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"Config file {p} must contain a mapping at the top level")
    return dict(data)


def dump_config_file(path: str | os.PathLike[str], data: Mapping[str, Any]) -> None:
    """Write a mapping as YAML atomically."""

    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    tmp = p.with_name(f".{p.name}.tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        _yaml.dump(_plain(data), f)
    tmp.replace(p)


def _plain(value: Any) -> Any:
    if isinstance(value, Mapping):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def set_dotted(target: dict[str, Any], dotted_key: str, value: Any) -> None:
    """Assign ``value`` at ``a.b.c`` inside nested dictionaries, creating levels as needed."""

    parts = dotted_key.split(".")
    node = target
    for part in parts[:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            child = {}
            node[part] = child
        node = child
    node[parts[-1]] = value


def layer_config(*layers: Mapping[str, Any] | None, overrides: Mapping[str, Any] | None = None) -> dict[str, Any]:
    """Deep-merge mappings left to right, then apply non-``None`` dotted overrides.

    ``None`` override values mean "flag not given" and never clobber lower layers.
    """

    merged: dict[str, Any] = {}
    for layer in layers:
        if layer:
            _deep_merge(merged, layer)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        set_dotted(merged, key, value)
    return merged


def _deep_merge(target: dict[str, Any], source: Mapping[str, Any]) -> None:
    for key, value in source.items():
        existing = target.get(key)
        if isinstance(existing, dict) and isinstance(value, Mapping):
            _deep_merge(existing, value)  # pyright: ignore[reportUnknownArgumentType]
        elif isinstance(value, Mapping):
            nested: dict[str, Any] = {}
            _deep_merge(nested, value)  # pyright: ignore[reportUnknownArgumentType]
            target[key] = nested
        else:
            target[key] = value


__all__ = [
    "ENV_PREFIX",
    "EnvLoadResult",
    "EnvLoader",
    "bootstrap_env",
    "dump_config_file",
    "find_project_dir",
    "layer_config",
    "load_config_file",
    "merge_env_dicts",
    "set_dotted",
]
