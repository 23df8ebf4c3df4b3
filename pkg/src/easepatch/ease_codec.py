"""Stable-key sequence encoding.

Every array becomes an object whose members are keyed by short random
lowercase identifiers, plus a ``list_display_order`` member holding the
comma-separated key sequence::

    ["Alice", "Bob"]  ->  {"qe": "Alice", "mb": "Bob", "list_display_order": "qe,mb"}

Keys are drawn from a seeded generator so encodings are reproducible.
"""
from __future__ import annotations

import itertools
import random
import re
import string
from dataclasses import dataclass, field
from typing import Iterable

from .json_model import JsonPointer, JsonValue, kind

ORDER_KEY = "list_display_order"
KEY_PATTERN = re.compile(r"[a-z]{2,}")
ALPHABET = string.ascii_lowercase


class EaseError(ValueError):
    pass


class EncodeError(EaseError):
    pass


class DecodeError(EaseError):
    pass


class ReservedKeyCollision(EncodeError):
    pass


class MalformedOrder(DecodeError):
    pass


class DuplicateKey(MalformedOrder):
    pass


class InvalidKeyFormat(DecodeError):
    pass


class NotEase(EaseError):
    """A document required to be EASE-encoded fails validation."""


@dataclass(frozen=True)
class KeyPolicy:
    """Seed for key generation. The alphabet is fixed to ``a``-``z``."""

    seed: int = 0

    def rng(self) -> random.Random:
        return random.Random(self.seed)


def is_valid_key(key: str) -> bool:
    return isinstance(key, str) and KEY_PATTERN.fullmatch(key) is not None


def generate_key(taken: set[str] | frozenset[str], policy: KeyPolicy | random.Random) -> str:
    """Draw a key not in ``taken``.

    Two letters while the two-letter space has room, then three, and so on.
    Passing a ``KeyPolicy`` starts a fresh generator from its seed; pass a
    ``random.Random`` to continue an existing stream.
    """
    rng = policy.rng() if isinstance(policy, KeyPolicy) else policy
    # cheap guess from the total count; exact per-length counts only if sampling stalls
    length, capacity = 2, 26**2
    while len(taken) >= capacity:
        length += 1
        capacity += 26**length
    for _ in range(_MAX_TRIES):
        key = "".join(rng.choice(ALPHABET) for _ in range(length))
        if key not in taken:
            return key
    length = 2
    while sum(1 for k in taken if len(k) == length) >= 26**length:
        length += 1
    free = [
        key
        for key in ("".join(p) for p in itertools.product(ALPHABET, repeat=length))
        if key not in taken
    ]
    return rng.choice(free)


_MAX_TRIES = 64


def parse_display_order(text: str) -> list[str]:
    if not isinstance(text, str):
        raise MalformedOrder(f"{ORDER_KEY} must be a string, got {kind(text)}")
    if text.strip() == "":
        return []
    keys = [part.strip() for part in text.split(",")]
    seen = set()
    for key in keys:
        if not is_valid_key(key):
            raise InvalidKeyFormat(f"invalid key {key!r} in {ORDER_KEY} {text!r}")
        if key in seen:
            raise DuplicateKey(f"key {key!r} appears twice in {ORDER_KEY} {text!r}")
        seen.add(key)
    return keys


def format_display_order(keys: Iterable[str]) -> str:
    keys = list(keys)
    if len(set(keys)) != len(keys):
        dup = next(k for k in keys if keys.count(k) > 1)
        raise DuplicateKey(f"key {dup!r} appears twice")
    return ",".join(keys)


def is_ease_list(value: JsonValue) -> bool:
    return isinstance(value, dict) and ORDER_KEY in value


# --------------------------------------------------------------------------
# encode


def encode(doc: JsonValue, policy: KeyPolicy = KeyPolicy()) -> JsonValue:
    return encode_with(doc, policy.rng())


def encode_with(doc: JsonValue, rng: random.Random) -> JsonValue:
    """Encode drawing keys from an existing generator stream."""
    return _encode(doc, rng, JsonPointer())


def _encode(value, rng, where):
    if isinstance(value, list):
        out = {}
        order = []
        for i, item in enumerate(value):
            key = generate_key(out.keys(), rng)
            out[key] = _encode(item, rng, where / i)
            order.append(key)
        out[ORDER_KEY] = format_display_order(order)
        return out
    if isinstance(value, dict):
        if ORDER_KEY in value:
            raise ReservedKeyCollision(f"object at {str(where)!r} already uses {ORDER_KEY!r}")
        return {k: _encode(v, rng, where / k) for k, v in value.items()}
    return value


# --------------------------------------------------------------------------
# decode / validate


def ease_list_order(obj: dict) -> list[str]:
    """Validated key order of one EASE list object (children not inspected)."""
    order = parse_display_order(obj[ORDER_KEY])
    entries = [k for k in obj if k != ORDER_KEY]
    for key in entries:
        if not is_valid_key(key):
            raise InvalidKeyFormat(f"invalid list key {key!r}")
    missing = [k for k in order if k not in obj]
    if missing:
        raise MalformedOrder(f"{ORDER_KEY} references missing key(s) {', '.join(missing)}")
    omitted = [k for k in entries if k not in set(order)]
    if omitted:
        raise MalformedOrder(f"{ORDER_KEY} omits key(s) {', '.join(omitted)}")
    return order


def decode(doc: JsonValue) -> JsonValue:
    return _decode(doc, JsonPointer())


def _decode(value, where):
    if isinstance(value, dict):
        if ORDER_KEY in value:
            try:
                order = ease_list_order(value)
            except DecodeError as exc:
                raise type(exc)(f"at {str(where)!r}: {exc}") from None
            return [_decode(value[k], where / k) for k in order]
        return {k: _decode(v, where / k) for k, v in value.items()}
    if isinstance(value, list):
        return [_decode(v, where / i) for i, v in enumerate(value)]
    return value


@dataclass(frozen=True)
class Violation:
    pointer: JsonPointer
    kind: str
    message: str = field(compare=False)

    def __str__(self) -> str:
        return f"{self.kind} at {str(self.pointer)!r}: {self.message}"


def validate_ease(doc: JsonValue) -> list[Violation]:
    """Report every malformed EASE list in ``doc``; empty iff :func:`decode` succeeds."""
    found: list[Violation] = []
    _validate(doc, JsonPointer(), found)
    return found


def _validate(value, where, found):
    if isinstance(value, dict):
        if ORDER_KEY in value:
            try:
                ease_list_order(value)
            except DecodeError as exc:
                found.append(Violation(where, type(exc).__name__, str(exc)))
        for k, v in value.items():
            if k != ORDER_KEY:
                _validate(v, where / k, found)
    elif isinstance(value, list):
        for i, v in enumerate(value):
            _validate(v, where / i, found)
