"""Evaluation of predicted patches against gold labels.

Three measures per example: op/path F1 (values ignored), whether the
predicted patch applies, and output token counts against a full-document
baseline.  Aggregates are macro averages.
"""
from __future__ import annotations

import json
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import fmean
from typing import Callable, Iterable, Literal, Mapping, NamedTuple, Union

from .ease_codec import KeyPolicy, encode
from .json_model import JsonValue, dumps, dumps_compact, json_equal, loads
from .patch_engine import InvalidPatch, Patch, PatchApplyError, apply_patch, parse_patch
from .translate import standard_patch_paths_to_ease

CATEGORIES = ("simple", "creative", "complex", "list_manipulation")

TokenCounter = Callable[[str], int]

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


def default_token_counter(text: str) -> int:
    """Count word runs and individual punctuation characters.

    Model-agnostic stand-in for a vendor tokenizer; ``{"op":"add"}`` is 9 tokens.
    """
    return len(_TOKEN_RE.findall(text))


def count_tokens(text: str, counter: TokenCounter | None = None) -> int:
    return (counter or default_token_counter)(text)


class OpPathSig(NamedTuple):
    op: str
    path: str


def signatures(patch: Patch) -> Counter:
    return Counter(OpPathSig(op.op, str(op.path)) for op in patch)


def f1_from_counts(predicted: Counter, gold: Counter) -> tuple[float, float, float]:
    n_pred, n_gold = sum(predicted.values()), sum(gold.values())
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0, 1.0
    if n_pred == 0 or n_gold == 0:
        return 0.0, 0.0, 0.0
    matched = sum((predicted & gold).values())
    precision, recall = matched / n_pred, matched / n_gold
    if matched == 0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


def op_path_f1(predicted: Patch, gold: Patch) -> tuple[float, float, float]:
    """Multiset precision, recall and F1 over ``(op, path)`` pairs."""
    return f1_from_counts(signatures(predicted), signatures(gold))


def execution_success(doc: JsonValue, predicted: Patch | str | list | None) -> bool:
    """True iff ``predicted`` parses as a patch and applies cleanly to ``doc``."""
    if predicted is None:
        return False
    try:
        patch = predicted if isinstance(predicted, Patch) else parse_patch(predicted)
        apply_patch(doc, patch)
    except (InvalidPatch, PatchApplyError):
        return False
    return True


# --------------------------------------------------------------------------
# costs


def cost_per_thousand(output_tokens: float, price_per_million_out: float,
                      input_tokens: float = 0, price_per_million_in: float = 0.0) -> float:
    """Dollar cost of 1,000 requests at the given per-million-token prices."""
    return 1000 * (output_tokens * price_per_million_out + input_tokens * price_per_million_in) / 1e6


def generation_seconds(output_tokens: float, time_per_output_token: float) -> float:
    return output_tokens * time_per_output_token


def improvement(baseline: float, candidate: float) -> float:
    return 1 - candidate / baseline


# --------------------------------------------------------------------------
# corpus evaluation


@dataclass
class EditExample:
    id: str
    category: str
    input: JsonValue
    instruction: str
    patch: Patch
    output: JsonValue

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise ValueError(f"unknown category {self.category!r}")
        if not isinstance(self.patch, Patch):
            self.patch = parse_patch(self.patch)

    def check(self) -> bool:
        try:
            return json_equal(apply_patch(self.input, self.patch), self.output)
        except PatchApplyError:
            return False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "input": self.input,
            "instruction": self.instruction,
            "patch": self.patch.to_list(),
            "output": self.output,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "EditExample":
        return cls(obj["id"], obj["category"], obj["input"], obj["instruction"],
                   parse_patch(obj["patch"]), obj["output"])


Prediction = Union[Patch, str, None]
"""A parsed patch, raw model text that may or may not parse, or nothing."""


class MissingPrediction(KeyError):
    pass


@dataclass
class ExampleScore:
    id: str
    category: str
    precision: float
    recall: float
    f1: float
    executed: bool
    predicted_tokens: int
    baseline_tokens: int


@dataclass
class EvalReport:
    mode: str
    per_example: list[ExampleScore]
    aggregate: dict
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "aggregate": self.aggregate,
            "per_example": [asdict(s) for s in self.per_example],
            "metadata": self.metadata,
        }

    def dumps(self) -> str:
        return dumps(self.to_dict())

    def table(self) -> str:
        rows = [("category", "n", "precision", "recall", "f1", "executed")]
        for name, agg in list(self.aggregate["by_category"].items()) + [("overall", self.aggregate["overall"])]:
            rows.append((name, str(agg["n"]), f"{agg['precision']:.3f}", f"{agg['recall']:.3f}",
                         f"{agg['f1']:.3f}", f"{agg['execution_success']:.3f}"))
        widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
        lines = ["  ".join(cell.ljust(w) if c == 0 else cell.rjust(w)
                           for c, (cell, w) in enumerate(zip(row, widths))) for row in rows]
        tok = self.aggregate["tokens"]
        lines.append(f"tokens: predicted={tok['predicted']} baseline={tok['baseline']} "
                     f"reduction={tok['reduction_ratio']:.4f}")
        return "\n".join(lines)


def _summarize(scores: list[ExampleScore]) -> dict:
    if not scores:
        return {"n": 0, "precision": 0.0, "recall": 0.0, "f1": 0.0, "execution_success": 0.0}
    return {
        "n": len(scores),
        "precision": fmean(s.precision for s in scores),
        "recall": fmean(s.recall for s in scores),
        "f1": fmean(s.f1 for s in scores),
        "execution_success": sum(s.executed for s in scores) / len(scores),
    }


def aggregate(scores: list[ExampleScore]) -> dict:
    """Macro averages per category and overall, plus token totals."""
    predicted = sum(s.predicted_tokens for s in scores)
    baseline = sum(s.baseline_tokens for s in scores)
    return {
        "overall": _summarize(scores),
        "by_category": {c: _summarize([s for s in scores if s.category == c])
                        for c in CATEGORIES if any(s.category == c for s in scores)},
        "tokens": {
            "predicted": predicted,
            "baseline": baseline,
            "reduction_ratio": 1 - predicted / baseline if baseline else 0.0,
        },
    }


def score_example(example: EditExample, prediction: Prediction, mode: str = "standard",
                  policy: KeyPolicy = KeyPolicy(), counter: TokenCounter | None = None) -> ExampleScore:
    baseline_tokens = count_tokens(dumps_compact(example.output), counter)
    doc = example.input
    gold = signatures(example.patch)
    if mode == "ease":
        doc = encode(example.input, policy)
        paths = standard_patch_paths_to_ease(doc, [op.path for op in example.patch], strict=False)
        gold = Counter(OpPathSig(op.op, str(p)) for op, p in zip(example.patch, paths))

    patch = None
    if isinstance(prediction, Patch):
        patch = prediction
        predicted_tokens = count_tokens(patch.dumps(compact=True), counter)
    elif isinstance(prediction, str):
        predicted_tokens = count_tokens(prediction, counter)
        try:
            patch = parse_patch(prediction)
        except InvalidPatch:
            patch = None
    else:
        predicted_tokens = 0

    if patch is None:
        p = r = f = 0.0
        executed = False
    else:
        p, r, f = f1_from_counts(signatures(patch), gold)
        executed = execution_success(doc, patch)
    return ExampleScore(example.id, example.category, p, r, f, executed, predicted_tokens, baseline_tokens)


def evaluate_corpus(
    examples: Iterable[EditExample],
    predictions: Mapping[str, Prediction],
    mode: Literal["standard", "ease"] = "standard",
    *,
    policy: KeyPolicy = KeyPolicy(),
    counter: TokenCounter | None = None,
    workers: int = 1,
) -> EvalReport:
    """Score every example and aggregate.

    In ``ease`` mode predictions are applied to ``encode(input, policy)`` and
    gold paths are rewritten to EASE keys before comparison.  Baseline tokens
    are those of the gold rewritten document (what full regeneration emits).
    """
    if mode not in ("standard", "ease"):
        raise ValueError(f"unknown mode {mode!r}")
    examples = list(examples)
    missing = [ex.id for ex in examples if ex.id not in predictions]
    if missing:
        raise MissingPrediction(f"no prediction for {', '.join(missing)}")

    def run(ex):
        return score_example(ex, predictions[ex.id], mode, policy, counter)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            scores = list(pool.map(run, examples))
    else:
        scores = [run(ex) for ex in examples]
    metadata = {
        "aggregation": "macro (unweighted mean of per-example values)",
        "signature_matching": "multiset over (op, path); values ignored",
        "baseline_tokens": "gold rewritten document, compact serialization",
    }
    if mode == "ease":
        metadata["gold_paths"] = (
            "gold index paths mapped to EASE keys of the encoded input; "
            "paths with no EASE equivalent (insertions, new content) kept verbatim"
        )
        metadata["key_seed"] = policy.seed
    return EvalReport(mode, scores, aggregate(scores), metadata)


# --------------------------------------------------------------------------
# files


def read_jsonl(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            if line.strip():
                try:
                    rows.append(loads(line))
                except ValueError as exc:
                    raise ValueError(f"{path}:{n}: {exc}") from None
    return rows


def write_jsonl(path, rows: Iterable[dict]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")


def load_corpus(path) -> list[EditExample]:
    return [EditExample.from_dict(row) for row in read_jsonl(path)]


def save_corpus(path, examples: Iterable[EditExample]) -> None:
    write_jsonl(path, (ex.to_dict() for ex in examples))


def load_predictions(path) -> dict[str, Prediction]:
    """Predictions file: one ``{"id", "patch"}`` or ``{"id", "raw"}`` record per line.

    ``patch`` may be a JSON array (parsed here; invalid arrays count as failed)
    or null when the model produced nothing usable.
    """
    out: dict[str, Prediction] = {}
    for row in read_jsonl(path):
        if row.get("patch") is not None:
            try:
                out[row["id"]] = parse_patch(row["patch"])
            except InvalidPatch:
                out[row["id"]] = json.dumps(row["patch"])
        elif row.get("raw") is not None:
            out[row["id"]] = row["raw"]
        else:
            out[row["id"]] = None
    return out
