"""
Layered configuration: dataclass defaults < config file < command-line flags.

A config file is a JSON object with optional sections "simulation", "model" and
"training", each mapping field names of the corresponding dataclass to values.
Every dataclass field is also mirrored as a flag named --<section>-<field>
(underscores become hyphens), and any field can be set with
--set <section>.<field>=<value>. Unknown keys are errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import difflib
import enum
import json
import platform
import sys
import types
import typing
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd
import scipy

from errors import UsageError, ValidationError

FLAG_PREFIX = {"simulation": "sim", "model": "model", "training": "train"}


def _suggest(key: str, choices: typing.Iterable[str]) -> str:
    close = difflib.get_close_matches(key, list(choices), n=1)
    return f"; did you mean '{close[0]}'?" if close else ""


def load_config_file(path: str | Path | None) -> dict[str, dict[str, Any]]:
    """Read a JSON config file; returns {} for no path."""
    if path is None:
        return {}
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ValidationError(f"config file '{path}' does not exist") from e
    except json.JSONDecodeError as e:
        raise ValidationError(f"config file '{path}' is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ValidationError(f"config file '{path}' must contain a JSON object")
    for section, values in data.items():
        if section not in FLAG_PREFIX:
            raise UsageError(f"unknown config section '{section}'{_suggest(section, FLAG_PREFIX)}")
        if not isinstance(values, dict):
            raise ValidationError(f"config section '{section}' must be an object")
    return data


def _optional_inner(hint: Any) -> tuple[Any, bool]:
    if typing.get_origin(hint) in (typing.Union, types.UnionType):
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        if len(args) == 1:
            return args[0], True
    return hint, False


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def converter(hint: Any) -> Callable[[str], Any]:
    """String -> value parser for a dataclass field type."""
    inner, optional = _optional_inner(hint)
    if inner is bool:
        parse: Callable[[str], Any] = _parse_bool
    elif isinstance(inner, type) and issubclass(inner, enum.Enum):
        parse = inner
    elif inner in (int, float, str):
        parse = inner
    else:
        parse = json.loads

    def convert(text: str) -> Any:
        if optional and text.strip().lower() in ("none", "null"):
            return None
        return parse(text)

    convert.__name__ = getattr(inner, "__name__", "value")
    return convert


def field_hints(cls: type) -> dict[str, Any]:
    hints = typing.get_type_hints(cls)
    return {f.name: hints[f.name] for f in dataclasses.fields(cls)}


def add_dataclass_flags(parser: argparse.ArgumentParser, cls: type, section: str) -> None:
    """One --<prefix>-<field> flag per dataclass field, default None so the file can win."""
    group = parser.add_argument_group(f"{section} settings")
    for name, hint in field_hints(cls).items():
        flag = f"--{FLAG_PREFIX[section]}-{name.replace('_', '-')}"
        group.add_argument(flag, dest=f"{section}.{name}", type=converter(hint), default=None, metavar="VALUE")


def parse_overrides(items: list[str] | None) -> dict[str, dict[str, str]]:
    """Parse repeated --set section.key=value items."""
    overrides: dict[str, dict[str, str]] = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        section, dot, name = key.partition(".")
        if not sep or not dot:
            raise UsageError(f"--set expects section.key=value, got '{item}'")
        if section not in FLAG_PREFIX:
            raise UsageError(f"unknown config section '{section}'{_suggest(section, FLAG_PREFIX)}")
        overrides.setdefault(section, {})[name] = value
    return overrides


def dataclass_from_mapping(cls: type, values: dict[str, Any]) -> Any:
    """Instantiate cls from a mapping, rejecting unknown keys."""
    hints = field_hints(cls)
    for key in values:
        if key not in hints:
            raise UsageError(f"unknown {cls.__name__} field '{key}'{_suggest(key, hints)}")
    try:
        return cls(**values)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"invalid {cls.__name__}: {e}") from e


def resolve_values(
    cls: type,
    section: str,
    file_config: dict[str, dict[str, Any]],
    args: argparse.Namespace | None = None,
    base: dict[str, Any] | None = None,
    overrides: dict[str, dict[str, str]] | None = None,
) -> dict[str, Any]:
    """
    Merge one section in precedence order:
    `base` (command defaults) < config file < --set overrides < explicit flags.
    """
    hints = field_hints(cls)
    values: dict[str, Any] = dict(base or {})
    values.update(file_config.get(section, {}))
    for name, text in (overrides or {}).get(section, {}).items():
        if name not in hints:
            raise UsageError(f"unknown {cls.__name__} field '{name}'{_suggest(name, hints)}")
        try:
            values[name] = converter(hints[name])(text)
        except (ValueError, json.JSONDecodeError) as e:
            raise ValidationError(f"bad value for {section}.{name}: {e}") from e
    if args is not None:
        for name in hints:
            value = getattr(args, f"{section}.{name}", None)
            if value is not None:
                values[name] = value
    for key in values:
        if key not in hints:
            raise UsageError(f"unknown {cls.__name__} field '{key}'{_suggest(key, hints)}")
    return values


def resolve(cls: type, section: str, file_config: dict[str, dict[str, Any]], **kwargs: Any) -> Any:
    """resolve_values, instantiated."""
    return dataclass_from_mapping(cls, resolve_values(cls, section, file_config, **kwargs))


def _jsonable(value: Any) -> Any:
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        to_dict = getattr(value, "to_dict", None)
        return to_dict() if to_dict else dataclasses.asdict(value)
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


def write_manifest(path: str | Path, argv: list[str], **entries: Any) -> Path:
    """Record resolved configs, seeds and library versions of a run."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "argv": argv,
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
        "platform": sys.platform,
        **{key: _jsonable(value) for key, value in entries.items()},
    }
    path.write_text(json.dumps(manifest, indent=2, default=_jsonable) + "\n")
    return path
