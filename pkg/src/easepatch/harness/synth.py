"""Synthetic edit-example generation.

Four steps per example:

1. generate a JSON instance for the schema,
2. ask for an edit request of a given category,
3. ask for the fully rewritten document (full-regeneration prompt),
4. label the example with ``diff(instance, rewrite)``.

Each instance is reused for up to ``requests_per_instance`` requests.
Examples whose rewrite drifts from the schema, or whose label does not
reproduce the rewrite, are dropped and logged.
"""
from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Mapping

import jsonschema

from ..diff import diff
from ..json_model import JsonParseError, JsonValue, dumps, json_equal, kind, loads
from ..metrics import CATEGORIES, EditExample
from ..patch_engine import PatchApplyError, apply_patch
from .clients import GenerationParams, LlmClient
from .edit import OutputParseError, extract_object, parse_model_output
from .prompts import EditRequest, build_prompt

log = logging.getLogger(__name__)

CATEGORY_GUIDE = {
    "simple": "affects a single field without impacting others",
    "creative": "involves generating new content that does not exist in the original JSON",
    "complex": "requires modifying multiple related elements while preserving logical consistency",
    "list_manipulation": "involves ordering, filtering, or updating items within a list",
}


class SchemaViolation(ValueError):
    pass


@dataclass
class Discarded:
    id: str
    category: str
    reason: str


@dataclass
class SynthesisResult:
    examples: list[EditExample]
    discarded: list[Discarded] = field(default_factory=list)


def instance_prompt(schema_description: str, n: int, seed: int) -> str:
    return (
        "Generate one realistic JSON instance that follows the schema below.\n"
        f"Make it distinct from other instances (instance #{n}, seed {seed}).\n\n"
        f"Schema:\n{schema_description.strip()}\n\n"
        "Return only the JSON instance.\n"
    )


def request_prompt(instance: JsonValue, category: str, n: int) -> str:
    return (
        "Here is a JSON document:\n"
        f"{dumps(instance).rstrip()}\n\n"
        "Write one natural-language edit request a user might give for this document.\n"
        f"Category: {category} - the request {CATEGORY_GUIDE[category]}.\n"
        f"Request #{n}.\n"
        "Return only the request text.\n"
    )


def _json_schema(schema_description: str) -> dict | None:
    try:
        schema = loads(schema_description)
    except JsonParseError:
        return None
    return schema if isinstance(schema, dict) else None


def same_shape(reference: JsonValue, candidate: JsonValue) -> bool:
    """Loose structural match used when the schema is free text.

    Objects need identical key sets; every array element of ``candidate`` must
    match the shape of some element of the reference array.
    """
    if kind(reference) != kind(candidate):
        return False
    if isinstance(reference, dict):
        return reference.keys() == candidate.keys() and all(
            same_shape(reference[k], candidate[k]) for k in reference
        )
    if isinstance(reference, list):
        if not reference:
            return True
        return all(any(same_shape(r, c) for r in reference) for c in candidate)
    return True


def _conforms(value: JsonValue, schema: dict | None, reference: JsonValue | None) -> str | None:
    if schema is not None:
        try:
            jsonschema.validate(value, schema)
        except jsonschema.ValidationError as exc:
            return exc.message
        return None
    if reference is None:
        return None if isinstance(value, (dict, list)) else f"expected an object or array, got {kind(value)}"
    return None if same_shape(reference, value) else "structure differs from the original instance"


def _parse_instance(text: str) -> JsonValue:
    try:
        return loads(text.strip())
    except JsonParseError:
        return extract_object(text)


def _parse_request(text: str) -> str:
    try:
        obj = extract_object(text)
    except OutputParseError:
        text = text.strip()
        if len(text) >= 2 and text[0] == text[-1] == '"':
            text = text[1:-1].strip()
        return text
    return str(obj.get("request", "")).strip()


def plan(counts: Mapping[str, int], seed: int) -> list[str]:
    """Category of each example, in generation order."""
    unknown = set(counts) - set(CATEGORIES)
    if unknown:
        raise ValueError(f"unknown categories: {', '.join(sorted(unknown))}")
    order = [c for c in CATEGORIES for _ in range(counts.get(c, 0))]
    random.Random(seed).shuffle(order)
    return order


def synthesize_dataset(
    client: LlmClient,
    schema_description: str,
    counts: Mapping[str, int],
    seed: int = 0,
    *,
    requests_per_instance: int = 4,
    params: GenerationParams | None = None,
) -> SynthesisResult:
    schema = _json_schema(schema_description)
    categories = plan(counts, seed)
    result = SynthesisResult([])
    instance = None
    for n, category in enumerate(categories):
        example_id = f"ex{n:04d}"
        if n % requests_per_instance == 0:
            k = n // requests_per_instance
            text = client.complete(instance_prompt(schema_description, k, seed), params).text
            try:
                instance = _parse_instance(text)
            except OutputParseError as exc:
                raise SchemaViolation(f"instance {k} is not JSON: {exc}") from None
            problem = _conforms(instance, schema, None)
            if problem:
                raise SchemaViolation(f"instance {k} does not match the schema: {problem}")

        request = _parse_request(client.complete(request_prompt(instance, category, n), params).text)
        if not request:
            result.discarded.append(Discarded(example_id, category, "empty edit request"))
            log.info("discarded %s: empty edit request", example_id)
            continue

        rewrite_text = client.complete(build_prompt(EditRequest(instance, request, "full")), params).text
        try:
            _, rewrite, unsupported = parse_model_output(rewrite_text, "full")
        except OutputParseError as exc:
            reason = f"unusable rewrite: {exc}"
        else:
            if unsupported:
                reason = "rewrite flagged the request as unsupported"
            else:
                reason = _conforms(rewrite, schema, instance)
                if reason:
                    reason = f"schema drift: {reason}"
        if reason:
            result.discarded.append(Discarded(example_id, category, reason))
            log.info("discarded %s: %s", example_id, reason)
            continue

        gold = diff(instance, rewrite)
        try:
            reproduced = json_equal(apply_patch(instance, gold), rewrite)
        except PatchApplyError:
            reproduced = False
        if not reproduced:
            result.discarded.append(Discarded(example_id, category, "label does not reproduce rewrite"))
            log.warning("discarded %s: label does not reproduce rewrite", example_id)
            continue
        result.examples.append(EditExample(example_id, category, instance, request, gold, rewrite))
    return result
