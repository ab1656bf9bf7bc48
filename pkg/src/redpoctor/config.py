"""Flat ``key = value`` configuration files.

Every :class:`~redpoctor.pipeline.PipelineConfig` field is addressable by a
dotted path, e.g.::

    # budget
    w = 14
    epsilon_total = 3
    allocation.phi = 0.2
    sensitivity.alpha = 150/14
    filter.enabled = false
    sampler.max_interval = none

Blank lines and ``#`` comments are ignored. Values are coerced to the field's
declared type; ``none`` clears an optional field and ``a/b`` is accepted for
real-valued fields.
"""

from __future__ import annotations

import dataclasses
import typing
from fractions import Fraction
from typing import Any, Dict, Iterable, Mapping, Optional, Tuple

from .errors import ConfigError
from .pipeline import PipelineConfig

_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}

# Short names accepted on the command line in addition to dotted paths.
ALIASES = {"epsilon": "epsilon_total", "eps": "epsilon_total"}


def _unwrap_optional(tp) -> Tuple[Any, bool]:
    if typing.get_origin(tp) is typing.Union:
        args = [a for a in typing.get_args(tp) if a is not type(None)]
        if len(args) == 1:
            return args[0], True
    return tp, False


def _coerce(text: str, tp, key: str):
    tp, optional = _unwrap_optional(tp)
    raw = text.strip()
    if optional and raw.lower() in ("none", "null", ""):
        return None
    try:
        if tp is bool:
            low = raw.lower()
            if low in _TRUE:
                return True
            if low in _FALSE:
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if tp is int:
            return int(raw)
        if tp is float:
            return float(Fraction(raw)) if "/" in raw else float(raw)
        if tp is str:
            return raw
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: {exc}") from None
    raise ConfigError(f"{key}: unsupported field type {tp!r}")


def _field_types(cls) -> Dict[str, Any]:
    hints = typing.get_type_hints(cls)
    return {f.name: hints[f.name] for f in dataclasses.fields(cls)}


def config_keys(cls=PipelineConfig, prefix: str = "") -> Dict[str, Any]:
    """All addressable dotted keys and their types."""
    keys: Dict[str, Any] = {}
    for name, tp in _field_types(cls).items():
        if dataclasses.is_dataclass(tp):
            keys.update(config_keys(tp, f"{prefix}{name}."))
        else:
            keys[f"{prefix}{name}"] = tp
    return keys


def _apply(obj, path: Tuple[str, ...], text: str, full_key: str):
    types = _field_types(type(obj))
    head = path[0]
    if head not in types:
        raise ConfigError(f"unknown config key {full_key!r}")
    tp = types[head]
    if dataclasses.is_dataclass(tp):
        if len(path) == 1:
            raise ConfigError(f"{full_key!r} is a section; set one of its fields")
        value = _apply(getattr(obj, head), path[1:], text, full_key)
    else:
        if len(path) != 1:
            raise ConfigError(f"unknown config key {full_key!r}")
        value = _coerce(text, tp, full_key)
    try:
        return dataclasses.replace(obj, **{head: value})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{full_key}: {exc}") from None


def apply_overrides(config: PipelineConfig, items: Iterable[Tuple[str, str]]) -> PipelineConfig:
    """Apply ``(dotted_key, text_value)`` pairs in order."""
    for key, text in items:
        key = ALIASES.get(key.strip(), key.strip())
        if not key:
            raise ConfigError("empty config key")
        config = _apply(config, tuple(key.split(".")), text, key)
    return config


def split_assignment(text: str, *, line: Optional[int] = None) -> Tuple[str, str]:
    """``"key = value"`` (or ``key=value``) into its two stripped halves."""
    if "=" not in text:
        where = f"line {line}: " if line is not None else ""
        raise ConfigError(f"{where}expected 'key = value', got {text.strip()!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def parse_config_text(text: str) -> list:
    items = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            items.append(split_assignment(line, line=lineno))
    return items


def load_config(path=None, overrides: Iterable[str] = (), base: Optional[PipelineConfig] = None) -> PipelineConfig:
    """Defaults, then the file at ``path`` (if any), then ``key=value`` overrides."""
    config = base if base is not None else PipelineConfig()
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        config = apply_overrides(config, parse_config_text(text))
    return apply_overrides(config, [split_assignment(o) for o in overrides])


def config_to_flat(config: PipelineConfig) -> Dict[str, Any]:
    """Fully resolved config as ``{dotted_key: value}``; feeds back through :func:`apply_overrides`."""
    out: Dict[str, Any] = {}

    def walk(obj, prefix: str) -> None:
        for f in dataclasses.fields(obj):
            value = getattr(obj, f.name)
            if dataclasses.is_dataclass(value):
                walk(value, f"{prefix}{f.name}.")
            else:
                out[f"{prefix}{f.name}"] = value

    walk(config, "")
    return out


def format_config(flat: Mapping[str, Any]) -> str:
    """Render a flat mapping in the file format read by :func:`load_config`."""
    lines = []
    for key, value in flat.items():
        if value is None:
            text = "none"
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, str):
            text = value
        else:
            text = repr(value)
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + "\n"
