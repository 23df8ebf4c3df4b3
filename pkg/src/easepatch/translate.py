"""Conversion between key-addressed (EASE) and index-addressed patches.

Lowering goes through the documents rather than rewriting ops one by one:
encode, apply, decode, then diff against the original.  No index arithmetic
is needed and the result is correct by construction.
"""
from __future__ import annotations

import random
from typing import Iterable

from . import ease_codec
from .diff import correspondence, diff, diff_ease
from .ease_codec import (
    ORDER_KEY,
    KeyPolicy,
    NotEase,
    ease_list_order,
    encode,
    encode_with,
    format_display_order,
    generate_key,
    is_ease_list,
    validate_ease,
)
from .json_model import (
    JsonPointer,
    JsonValue,
    PathNotFound,
    TypeMismatch,
    array_index,
    as_pointer,
    kind,
)
from .patch_engine import Patch, apply_patch


def ease_patch_to_standard(original: JsonValue, policy: KeyPolicy, ease_patch: Patch) -> Patch:
    """Lower a patch written against ``encode(original, policy)`` to array indices.

    Raises ``EncodeError``, ``PatchApplyError`` or ``DecodeError`` depending on
    which stage fails.
    """
    encoded = encode(original, policy)
    edited = apply_patch(encoded, ease_patch)
    return diff(original, ease_codec.decode(edited))


def standard_patch_to_ease(original: JsonValue, policy: KeyPolicy, patch: Patch) -> Patch:
    """Lift an index-addressed patch into EASE form.

    Elements that survive the edit keep their keys (identity follows the diff
    alignment); new elements get fresh keys that never reuse a removed one.
    """
    encoded = encode(original, policy)
    target = apply_patch(original, patch)
    rng = random.Random(f"{policy.seed}:carry")
    return diff_ease(encoded, carry_keys(original, encoded, target, rng))


def carry_keys(old: JsonValue, old_encoded: JsonValue, new: JsonValue, rng: random.Random) -> JsonValue:
    """Encode ``new`` reusing the keys ``old_encoded`` gave to matching elements."""
    if isinstance(old, list) and isinstance(new, list):
        old_order = ease_list_order(old_encoded)
        mapping = correspondence(old, new)
        taken = set(old_order)
        out, order = {}, []
        for j, item in enumerate(new):
            if j in mapping:
                i = mapping[j]
                key = old_order[i]
                out[key] = carry_keys(old[i], old_encoded[key], item, rng)
            else:
                key = generate_key(taken, rng)
                taken.add(key)
                out[key] = encode_with(item, rng)
            order.append(key)
        out[ORDER_KEY] = format_display_order(order)
        return out
    if isinstance(old, dict) and isinstance(new, dict):
        return {
            k: carry_keys(old[k], old_encoded[k], v, rng) if k in old else encode_with(v, rng)
            for k, v in new.items()
        }
    return encode_with(new, rng)


def _require_ease(doc):
    problems = validate_ease(doc)
    if problems:
        raise NotEase("; ".join(map(str, problems)))


def _map_path(encoded: JsonValue, ptr: JsonPointer, strict: bool) -> JsonPointer:
    node = encoded
    out: list[str] = []
    for depth, token in enumerate(ptr.tokens):
        try:
            if is_ease_list(node):
                order = ease_list_order(node)
                key = order[array_index(token, len(order))]
                out.append(key)
                node = node[key]
            elif isinstance(node, dict):
                if token not in node:
                    raise PathNotFound(f"key {token!r} not found")
                out.append(token)
                node = node[token]
            else:
                raise TypeMismatch(f"cannot index {kind(node)} with {token!r}")
        except (PathNotFound, TypeMismatch):
            if strict:
                raise
            # insertion points and paths into new content have no EASE equivalent
            return JsonPointer(tuple(out) + ptr.tokens[depth:])
    return JsonPointer(tuple(out))


def standard_patch_paths_to_ease(
    encoded: JsonValue, standard_paths: Iterable[JsonPointer | str], strict: bool = True
) -> list[JsonPointer]:
    """Rewrite array-index tokens to the EASE keys at those positions.

    With ``strict=False`` a path that cannot be mapped keeps its remaining
    tokens verbatim instead of raising.
    """
    _require_ease(encoded)
    return [_map_path(encoded, as_pointer(p), strict) for p in standard_paths]


def ease_paths_to_standard(encoded: JsonValue, ease_paths: Iterable[JsonPointer | str]) -> list[JsonPointer]:
    """Inverse of :func:`standard_patch_paths_to_ease` for paths that resolve."""
    _require_ease(encoded)
    result = []
    for ptr in map(as_pointer, ease_paths):
        node = encoded
        out = []
        for token in ptr.tokens:
            if is_ease_list(node):
                order = ease_list_order(node)
                if token not in order:
                    raise PathNotFound(f"no list entry with key {token!r}")
                out.append(str(order.index(token)))
                node = node[token]
            elif isinstance(node, dict):
                if token not in node:
                    raise PathNotFound(f"key {token!r} not found")
                out.append(token)
                node = node[token]
            else:
                raise TypeMismatch(f"cannot index {kind(node)} with {token!r}")
        result.append(JsonPointer(tuple(out)))
    return result
