"""Running edit requests and pairwise judgements through an LLM client."""
from __future__ import annotations

import enum
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Mapping

from ..json_model import JsonParseError, JsonValue, loads
from ..patch_engine import InvalidPatch, Patch, parse_patch
from .clients import GenerationParams, LlmClient, Usage
from .prompts import PAYLOAD_FIELD, EditRequest, Mode, build_judge_prompt, build_prompt

_FENCE_RE = re.compile(r"```[a-zA-Z]*\s*\n?(.*?)```", re.S)


class OutputParseError(ValueError):
    pass


class UnparseableVerdict(ValueError):
    pass


@dataclass
class EditResult:
    mode: Mode
    rationale: str | None
    payload: Patch | JsonValue | None
    is_unsupported: bool
    raw: str
    usage: Usage
    error: str | None = None

    @property
    def ok(self) -> bool:
        """Output parsed and the model did not decline the request."""
        return self.error is None and not self.is_unsupported


def extract_object(text: str) -> dict:
    """Model output as a JSON object: the whole text, else the first fenced block that is one."""
    candidates = [text.strip()] + [m.group(1).strip() for m in _FENCE_RE.finditer(text)]
    for candidate in candidates:
        try:
            value = loads(candidate)
        except JsonParseError:
            continue
        if isinstance(value, dict):
            return value
    raise OutputParseError("no JSON object found in model output")


def _as_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str) and value.strip().lower() in ("true", "false"):
        return value.strip().lower() == "true"
    if value is None:
        return False
    raise OutputParseError(f"is_unsupported must be a boolean, got {value!r}")


def parse_model_output(text: str, mode: Mode) -> tuple[str | None, Any, bool]:
    """Return ``(rationale, payload, is_unsupported)``; payload is ``None`` if absent."""
    obj = extract_object(text)
    unsupported = _as_bool(obj.get("is_unsupported", False))
    rationale = obj.get("rationale")
    field = PAYLOAD_FIELD[mode]
    if field not in obj or obj[field] is None:
        if unsupported:
            return rationale, None, True
        raise OutputParseError(f"output has no {field!r}")
    payload = obj[field]
    # models often return the payload as a JSON string
    if isinstance(payload, str):
        try:
            payload = loads(payload)
        except JsonParseError as exc:
            if mode != "full":
                raise OutputParseError(f"{field} is not JSON: {exc}") from None
    if mode != "full":
        try:
            payload = parse_patch(payload)
        except InvalidPatch as exc:
            raise OutputParseError(f"invalid patch: {exc}") from None
    return rationale, payload, unsupported


def generate_edit(client: LlmClient, req: EditRequest, params: GenerationParams | None = None) -> EditResult:
    """Ask the model for an edit.  Only transport failures raise; bad output is recorded."""
    completion = client.complete(build_prompt(req), params)
    try:
        rationale, payload, unsupported = parse_model_output(completion.text, req.mode)
    except OutputParseError as exc:
        return EditResult(req.mode, None, None, False, completion.text, completion.usage, str(exc))
    return EditResult(req.mode, rationale, payload, unsupported, completion.text, completion.usage)


def generate_many(client: LlmClient, requests: Mapping[str, EditRequest], *,
                  parallelism: int = 1, params: GenerationParams | None = None) -> dict[str, EditResult]:
    """Run several requests, at most ``parallelism`` at a time; keyed like ``requests``."""
    ids = list(requests)
    if parallelism <= 1:
        return {i: generate_edit(client, requests[i], params) for i in ids}
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        results = pool.map(lambda i: generate_edit(client, requests[i], params), ids)
        return dict(zip(ids, results))


class Verdict(str, enum.Enum):
    W = "w"
    V = "v"
    TIE = "tie"

    def swapped(self) -> "Verdict":
        return {Verdict.W: Verdict.V, Verdict.V: Verdict.W}.get(self, self)


def parse_verdict(text: str) -> Verdict:
    answer: Any = text.strip()
    try:
        obj = json.loads(answer)
        if isinstance(obj, dict):
            answer = obj.get("quality_answer", "")
        elif isinstance(obj, str):
            answer = obj
    except ValueError:
        pass
    if not isinstance(answer, str):
        raise UnparseableVerdict(f"unexpected verdict {text!r}")
    answer = answer.strip()
    if answer.lower().startswith("quality_answer:"):
        answer = answer.split(":", 1)[1]
    answer = answer.strip().strip("\"'`.").strip().lower()
    try:
        return Verdict(answer)
    except ValueError:
        raise UnparseableVerdict(f"verdict must be w, v or tie, got {text!r}") from None


def judge_pair(client: LlmClient, original: JsonValue, w: JsonValue, v: JsonValue, command: str,
               *, debias: bool = True, params: GenerationParams | None = None) -> Verdict:
    """Which of two edited documents better follows ``command``.

    With ``debias`` the pair is also judged with the candidates swapped and
    disagreement between the two orderings becomes a tie.
    """
    first = parse_verdict(client.complete(build_judge_prompt(original, w, v, command), params).text)
    if not debias:
        return first
    second = parse_verdict(client.complete(build_judge_prompt(original, v, w, command), params).text)
    return first if first == second.swapped() else Verdict.TIE
