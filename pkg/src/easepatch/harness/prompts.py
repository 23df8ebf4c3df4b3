"""Prompt templates and prompt assembly.

A prompt is the mode's template followed by the few-shot examples and then
the task itself::

    <template>

    ### Example 1
    input_json:
    <compact JSON>
    user_command: <instruction>
    <output field>:
    <compact JSON>

    ### Input
    input_json:
    <indented JSON>
    user_command: <instruction>

    Respond with a single JSON object with the keys "rationale", "<output field>" and "is_unsupported".

In ``ease`` mode the input document (and every example's document) is shown
in encoded form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Any, Literal, NamedTuple

from ..ease_codec import KeyPolicy, encode
from ..json_model import JsonValue, dumps, dumps_compact

Mode = Literal["standard", "ease", "full"]
MODES = ("standard", "ease", "full")

PAYLOAD_FIELD = {"standard": "json_diff_patch", "ease": "json_diff_patch", "full": "updated_json"}

# Marker lines used by the layout above; parsers of prompts (e.g. scripted
# test models) rely on them.
INPUT_HEADER = "### Input"
EXAMPLE_HEADER = "### Example"


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    return resources.files("easepatch").joinpath("templates", f"{name}.txt").read_text("utf-8")


class FewShot(NamedTuple):
    """One demonstration, already in the form the target mode shows it."""

    doc: JsonValue
    instruction: str
    expected: Any


@dataclass(frozen=True)
class EditRequest:
    doc: JsonValue
    instruction: str
    mode: Mode = "standard"
    few_shots: tuple[FewShot, ...] = ()
    policy: KeyPolicy = field(default_factory=KeyPolicy)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        object.__setattr__(self, "few_shots", tuple(self.few_shots))

    def shown_doc(self) -> JsonValue:
        return encode(self.doc, self.policy) if self.mode == "ease" else self.doc


def build_prompt(req: EditRequest) -> str:
    payload = PAYLOAD_FIELD[req.mode]
    parts = [load_template(req.mode).rstrip("\n")]
    for n, shot in enumerate(req.few_shots, 1):
        parts.append(
            f"{EXAMPLE_HEADER} {n}\n"
            f"input_json:\n{dumps_compact(shot.doc)}\n"
            f"user_command: {shot.instruction}\n"
            f"{payload}:\n{dumps_compact(shot.expected)}"
        )
    parts.append(
        f"{INPUT_HEADER}\n"
        f"input_json:\n{dumps(req.shown_doc()).rstrip()}\n"
        f"user_command: {req.instruction}"
    )
    parts.append(
        f'Respond with a single JSON object with the keys "rationale", "{payload}" and "is_unsupported".'
    )
    return "\n\n".join(parts) + "\n"


def build_judge_prompt(original: JsonValue, w: JsonValue, v: JsonValue, command: str) -> str:
    return (
        load_template("judge").rstrip("\n")
        + "\n\n"
        + f"original_json:\n{dumps_compact(original)}\n"
        + f"w_json:\n{dumps_compact(w)}\n"
        + f"v_json:\n{dumps_compact(v)}\n"
        + f"user_command: {command}\n\n"
        + "Answer with the quality_answer value only.\n"
    )
