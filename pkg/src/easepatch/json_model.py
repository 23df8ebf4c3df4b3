"""JSON values and RFC 6901 pointers.

Documents are plain Python values (``None``, ``bool``, ``int``, ``float``,
``str``, ``list``, ``dict``).  Nothing in this package mutates a value it was
handed; every transformation builds new containers along the touched path and
shares the rest.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Iterable, Union

JsonValue = Union[None, bool, int, float, str, list, dict]


class JsonError(ValueError):
    """Base class for document and pointer errors."""


class JsonParseError(JsonError):
    pass


class InvalidEscape(JsonError):
    """A ``~`` in a pointer that is not followed by ``0`` or ``1``."""


class EmptyPointer(JsonError):
    pass


class PathNotFound(JsonError, LookupError):
    pass


class TypeMismatch(JsonError, TypeError):
    pass


class InvalidIndexToken(TypeMismatch):
    """Array reference token that is not a canonical non-negative integer."""


# --------------------------------------------------------------------------
# parsing / serialization


def _no_duplicate_keys(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise JsonParseError(f"duplicate object key {key!r}")
        obj[key] = value
    return obj


def _reject_constant(name):
    raise JsonParseError(f"{name} is not valid JSON")


def loads(text: str | bytes) -> JsonValue:
    """Parse strict JSON text, rejecting duplicate keys and NaN/Infinity."""
    try:
        return json.loads(
            text,
            object_pairs_hook=_no_duplicate_keys,
            parse_constant=_reject_constant,
        )
    except json.JSONDecodeError as exc:
        raise JsonParseError(str(exc)) from exc


def dumps(value: JsonValue) -> str:
    """Canonical serialization: two-space indent, key order kept, trailing newline."""
    return json.dumps(value, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dumps_compact(value: JsonValue) -> str:
    return json.dumps(value, ensure_ascii=False, separators=(",", ":"), allow_nan=False)


def load_file(path) -> JsonValue:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


# --------------------------------------------------------------------------
# equality


def kind(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    raise TypeError(f"not a JSON value: {type(value).__name__}")


def json_equal(a: Any, b: Any) -> bool:
    """Structural equality.

    ``1 == 1.0`` holds, ``True == 1`` does not, and object key order is
    ignored.
    """
    ka, kb = kind(a), kind(b)
    if ka != kb:
        return False
    if ka == "array":
        return len(a) == len(b) and all(json_equal(x, y) for x, y in zip(a, b))
    if ka == "object":
        return a.keys() == b.keys() and all(json_equal(a[k], b[k]) for k in a)
    return a == b


def canonical_key(value: Any) -> str:
    """A string that is equal for two values iff :func:`json_equal` holds."""
    return json.dumps(_normalize(value), sort_keys=True, separators=(",", ":"))


def _normalize(value):
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, float):
        if math.isfinite(value) and value.is_integer():
            return int(value)
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, list):
        return [_normalize(v) for v in value]
    if isinstance(value, dict):
        return {k: _normalize(v) for k, v in value.items()}
    raise TypeError(f"not a JSON value: {type(value).__name__}")


# --------------------------------------------------------------------------
# pointers


def escape_token(token: str) -> str:
    return token.replace("~", "~0").replace("/", "~1")


def unescape_token(token: str) -> str:
    i = token.find("~")
    while i != -1:
        if i + 1 >= len(token) or token[i + 1] not in "01":
            raise InvalidEscape(f"invalid escape in pointer token {token!r}")
        i = token.find("~", i + 2)
    return token.replace("~1", "/").replace("~0", "~")


@dataclass(frozen=True)
class JsonPointer:
    tokens: tuple[str, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "JsonPointer":
        return parse_pointer(text)

    @classmethod
    def from_tokens(cls, tokens: Iterable[Any]) -> "JsonPointer":
        return cls(tuple(str(t) for t in tokens))

    def __str__(self) -> str:
        return "".join("/" + escape_token(t) for t in self.tokens)

    def __repr__(self) -> str:
        return f"JsonPointer({str(self)!r})"

    def __truediv__(self, token: Any) -> "JsonPointer":
        return JsonPointer(self.tokens + (str(token),))

    def __len__(self) -> int:
        return len(self.tokens)

    def is_prefix_of(self, other: "JsonPointer") -> bool:
        return other.tokens[: len(self.tokens)] == self.tokens


ROOT = JsonPointer()


def parse_pointer(text: str) -> JsonPointer:
    """Parse a pointer string.

    A path without the leading slash (``users/0/name``) is accepted and
    treated as if the slash were there.
    """
    if isinstance(text, JsonPointer):
        return text
    if not isinstance(text, str):
        raise TypeMismatch(f"pointer must be a string, got {type(text).__name__}")
    if text == "":
        return ROOT
    if not text.startswith("/"):
        text = "/" + text
    return JsonPointer(tuple(unescape_token(t) for t in text[1:].split("/")))


def as_pointer(ptr: JsonPointer | str) -> JsonPointer:
    return ptr if isinstance(ptr, JsonPointer) else parse_pointer(ptr)


def parent_and_leaf(ptr: JsonPointer | str) -> tuple[JsonPointer, str]:
    ptr = as_pointer(ptr)
    if not ptr.tokens:
        raise EmptyPointer("the root pointer has no parent")
    return JsonPointer(ptr.tokens[:-1]), ptr.tokens[-1]


def array_index(token: str, length: int, *, allow_end: bool = False) -> int:
    """Decode an array reference token.

    ``allow_end`` admits ``-`` and ``length`` itself (insertion points).
    """
    if token == "-":
        if allow_end:
            return length
        raise PathNotFound("'-' refers to a nonexistent element")
    if not token.isdigit() or not token.isascii() or (len(token) > 1 and token[0] == "0"):
        raise InvalidIndexToken(f"invalid array index {token!r}")
    index = int(token)
    limit = length if allow_end else length - 1
    if index > limit:
        raise PathNotFound(f"index {index} out of range for array of length {length}")
    return index


def child(container: JsonValue, token: str, where: JsonPointer | None = None) -> JsonValue:
    if isinstance(container, dict):
        if token not in container:
            raise PathNotFound(f"key {token!r} not found" + (f" at {str(where)!r}" if where else ""))
        return container[token]
    if isinstance(container, list):
        return container[array_index(token, len(container))]
    raise TypeMismatch(f"cannot index {kind(container)} with {token!r}")


def resolve(doc: JsonValue, ptr: JsonPointer | str) -> JsonValue:
    ptr = as_pointer(ptr)
    node = doc
    for depth, token in enumerate(ptr.tokens):
        node = child(node, token, JsonPointer(ptr.tokens[:depth]))
    return node


def contains(doc: JsonValue, ptr: JsonPointer | str) -> bool:
    try:
        resolve(doc, ptr)
    except JsonError:
        return False
    return True
