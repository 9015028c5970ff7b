"""
Converts chz records to and from plain JSON values.

Unstructuring walks ``chz.chz_fields`` and emits logical (munged) values. Structuring walks the
same fields and each field's ``final_type``; any key a record does not declare is a ``ParseError``
naming its path, e.g. ``$.traffic.user_rte``.
"""

from __future__ import annotations

import enum
import json
import types
import typing
from pathlib import Path
from typing import Any, TypeVar

import chz
import numpy as np

from meshwave.errors import ParseError

_T = TypeVar("_T")


def unstructure(value: Any) -> Any:
    if chz.is_chz(value):
        return {name: unstructure(getattr(value, name)) for name in chz.chz_fields(value)}
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): unstructure(v) for k, v in value.items()}
    if isinstance(value, (frozenset, set)):
        return sorted(unstructure(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [unstructure(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def _fail(path: str, expected: str, data: Any) -> ParseError:
    return ParseError(f"{path}: expected {expected}, got {type(data).__name__} {data!r}")


def structure(typ: Any, data: Any, path: str = "$") -> Any:
    """Builds a value of type ``typ`` from JSON data, recursing through chz fields."""
    origin = typing.get_origin(typ)
    args = typing.get_args(typ)

    if origin is typing.Union or origin is types.UnionType:
        if data is None and type(None) in args:
            return None
        options = [a for a in args if a is not type(None)]
        errors = []
        for option in options:
            try:
                return structure(option, data, path)
            except ParseError as e:
                errors.append(str(e))
        raise ParseError("; ".join(errors))

    if typ is Any or typ is object:
        return data

    if isinstance(typ, type) and chz.is_chz(typ):
        if not isinstance(data, dict):
            raise _fail(path, "an object", data)
        fields = chz.chz_fields(typ)
        for key in data:
            if key not in fields:
                raise ParseError(f"unknown key {path}.{key}")
        return typ(
            **{
                name: structure(fields[name].final_type, value, f"{path}.{name}")
                for name, value in data.items()
            }
        )

    if isinstance(typ, type) and issubclass(typ, enum.Enum):
        try:
            return typ(data)
        except ValueError:
            choices = ", ".join(repr(m.value) for m in typ)
            raise ParseError(f"{path}: {data!r} is not one of {choices}") from None

    if origin in (tuple, list, frozenset):
        if not isinstance(data, list):
            raise _fail(path, "a list", data)
        if origin is tuple and not (len(args) == 2 and args[1] is Ellipsis):
            if len(data) != len(args):
                raise ParseError(f"{path}: expected {len(args)} items, got {len(data)}")
            return tuple(
                structure(a, v, f"{path}[{i}]") for i, (a, v) in enumerate(zip(args, data))
            )
        items = [structure(args[0], v, f"{path}[{i}]") for i, v in enumerate(data)]
        return origin(items)

    if origin is dict:
        if not isinstance(data, dict):
            raise _fail(path, "an object", data)
        key_type, value_type = args
        return {
            structure(key_type, k, path): structure(value_type, v, f"{path}.{k}")
            for k, v in data.items()
        }

    if typ is np.ndarray:
        if not isinstance(data, list):
            raise _fail(path, "a list", data)
        return np.asarray(data, dtype=float)

    if typ is bool:
        if not isinstance(data, bool):
            raise _fail(path, "a boolean", data)
        return data
    if typ is int:
        if isinstance(data, bool) or not isinstance(data, int):
            raise _fail(path, "an integer", data)
        return data
    if typ is float:
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise _fail(path, "a number", data)
        return float(data)
    if typ is str:
        if not isinstance(data, str):
            raise _fail(path, "a string", data)
        return data

    raise ParseError(f"{path}: cannot read values of type {typ!r}")


def dumps(obj: Any) -> str:
    return json.dumps(unstructure(obj), indent=2, allow_nan=False) + "\n"


def dump(obj: Any, path: str | Path) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path: str | Path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: not valid JSON ({e})") from None


def load(cls: type[_T], path: str | Path) -> _T:
    return structure(cls, read_json(path))


def load_report(path: str | Path) -> Any:
    """Reads a ``run.json`` or ``comparison.json`` written by the command line back into records."""
    from meshwave.engine import ComparisonReport, SimulationReport

    data = read_json(path)
    if not isinstance(data, dict):
        raise _fail("$", "an object", data)
    cls = ComparisonReport if "deltas" in data else SimulationReport
    return structure(cls, data)
