"""Few-shot selection.

Selection is category-stratified: categories are visited round-robin in a
fixed order and each contributes its next example from a seeded shuffle.
The shuffle seed mixes the caller's seed with the request instruction, so
different requests see different demonstrations while any one request is
reproducible.
"""
from __future__ import annotations

import random
from typing import Iterable

from ..ease_codec import KeyPolicy, encode
from ..metrics import CATEGORIES, EditExample
from ..translate import standard_patch_to_ease
from .prompts import FewShot, Mode


class PoolTooSmall(ValueError):
    pass


def shot_for(example: EditExample, mode: Mode, policy: KeyPolicy = KeyPolicy()) -> FewShot:
    """Render an example as a demonstration for ``mode``."""
    if mode == "standard":
        return FewShot(example.input, example.instruction, example.patch.to_list())
    if mode == "ease":
        ease_patch = standard_patch_to_ease(example.input, policy, example.patch)
        return FewShot(encode(example.input, policy), example.instruction, ease_patch.to_list())
    if mode == "full":
        return FewShot(example.input, example.instruction, example.output)
    raise ValueError(f"unknown mode {mode!r}")


def select_examples(pool: Iterable[EditExample], instruction: str, k: int, seed: int = 0,
                    exclude: Iterable[str] = ()) -> list[EditExample]:
    excluded = set(exclude)
    candidates = [ex for ex in pool if ex.id not in excluded]
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > len(candidates):
        raise PoolTooSmall(f"asked for {k} shots from a pool of {len(candidates)}")
    rng = random.Random(f"{seed}\x00{instruction}")
    buckets = []
    for category in CATEGORIES:
        bucket = sorted((ex for ex in candidates if ex.category == category), key=lambda ex: ex.id)
        rng.shuffle(bucket)
        buckets.append(bucket)
    chosen: list[EditExample] = []
    while len(chosen) < k:
        for bucket in buckets:
            if bucket and len(chosen) < k:
                chosen.append(bucket.pop(0))
    return chosen


def select_few_shots(pool: Iterable[EditExample], instruction: str, k: int, seed: int = 0, *,
                     mode: Mode = "standard", policy: KeyPolicy = KeyPolicy(),
                     exclude: Iterable[str] = ()) -> list[FewShot]:
    """Pick ``k`` demonstrations as ``(doc, instruction, expected)`` triples."""
    return [shot_for(ex, mode, policy) for ex in select_examples(pool, instruction, k, seed, exclude)]
