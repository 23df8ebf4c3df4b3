"""Command-line interface.

Payloads go to stdout as canonical JSON; diagnostics go to stderr.  Failing
operations exit 1 after printing ``error: <Kind>: <message>`` on one line;
usage errors exit 2.  A file argument of ``-`` reads stdin.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Sequence

from . import ease_codec, json_model, metrics
from .diff import DiffOptions, diff
from .ease_codec import KeyPolicy
from .json_model import dumps
from .patch_engine import apply_patch, parse_patch, validate_patch
from .translate import ease_patch_to_standard


class CliError(Exception):
    def __init__(self, kind: str, message: str, detail: str = ""):
        super().__init__(message)
        self.kind = kind
        self.detail = detail


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _read_json(path: str):
    return json_model.loads(_read_text(path))


def _emit(value) -> None:
    sys.stdout.write(dumps(value))


def _parse_counts(text: str) -> dict[str, int]:
    parts = text.split(",")
    if len(parts) != len(metrics.CATEGORIES):
        raise argparse.ArgumentTypeError("expected four comma-separated counts: simple,creative,complex,list")
    try:
        return dict(zip(metrics.CATEGORIES, (int(p) for p in parts)))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid counts {text!r}") from None


# --------------------------------------------------------------------------
# handlers


def cmd_ease(args) -> int:
    doc = _read_json(args.input)
    if args.action == "encode":
        _emit(ease_codec.encode(doc, KeyPolicy(args.seed)))
    elif args.action == "decode":
        _emit(ease_codec.decode(doc))
    else:
        problems = ease_codec.validate_ease(doc)
        _emit([{"pointer": str(v.pointer), "kind": v.kind, "message": v.message} for v in problems])
        if problems:
            print(f"{len(problems)} violation(s)", file=sys.stderr)
            return 1
    return 0


def cmd_patch(args) -> int:
    doc = _read_json(args.doc)
    patch = parse_patch(_read_text(args.patch))
    if args.action == "validate":
        issues = validate_patch(patch, doc)
        _emit([{"index": i.index, "op": i.op.op, "path": str(i.op.path), "error": i.error,
                "message": i.message} for i in issues])
        return 1 if issues else 0
    _emit(apply_patch(doc, patch))
    return 0


def cmd_diff(args) -> int:
    opts = DiffOptions(array_strategy=args.array_strategy, ease_aware=args.ease)
    _emit(diff(_read_json(args.a), _read_json(args.b), opts).to_list())
    return 0


def cmd_translate(args) -> int:
    original = _read_json(args.original)
    ease_patch = parse_patch(_read_text(args.ease_patch))
    _emit(ease_patch_to_standard(original, KeyPolicy(args.seed), ease_patch).to_list())
    return 0


def cmd_eval(args) -> int:
    examples = metrics.load_corpus(args.corpus)
    predictions = metrics.load_predictions(args.predictions)
    report = metrics.evaluate_corpus(examples, predictions, args.mode, policy=KeyPolicy(args.seed),
                                     workers=args.workers)
    sys.stdout.write(report.dumps())
    print(report.table(), file=sys.stderr)
    return 0


def cmd_dataset(args) -> int:
    from .harness import make_client, synthesize_dataset

    result = synthesize_dataset(make_client(args.client), _read_text(args.schema), args.counts, args.seed,
                                requests_per_instance=args.per_instance)
    rows = [ex.to_dict() for ex in result.examples]
    if args.out:
        metrics.write_jsonl(args.out, rows)
    else:
        for row in rows:
            sys.stdout.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")
    for d in result.discarded:
        print(f"discarded {d.id} ({d.category}): {d.reason}", file=sys.stderr)
    print(f"{len(rows)} example(s) written, {len(result.discarded)} discarded", file=sys.stderr)
    return 0


def _shots(args, instruction: str, exclude=()):
    from .harness import select_few_shots

    if not args.shots:
        return ()
    if not args.pool:
        raise CliError("UsageError", "--shots needs --pool")
    pool = metrics.load_corpus(args.pool)
    return select_few_shots(pool, instruction, args.shots, args.seed, mode=args.mode,
                            policy=KeyPolicy(args.seed), exclude=exclude)


def _result_record(result) -> dict:
    if result.error is not None:
        return {"raw": result.raw, "error": result.error}
    payload = result.payload
    if result.mode != "full" and payload is not None:
        payload = payload.to_list()
    return {"patch" if result.mode != "full" else "output": payload,
            "rationale": result.rationale, "is_unsupported": result.is_unsupported}


def cmd_edit(args) -> int:
    from .harness import EditRequest, generate_edit, make_client

    doc = _read_json(args.doc)
    req = EditRequest(doc, args.instruction, args.mode, _shots(args, args.instruction), KeyPolicy(args.seed))
    result = generate_edit(make_client(args.client), req)
    print(f"usage: input_tokens={result.usage.input_tokens} output_tokens={result.usage.output_tokens}",
          file=sys.stderr)
    if result.error is not None:
        raise CliError("OutputParseError", result.error, result.raw)
    if result.is_unsupported:
        print("model flagged the command as unsupported", file=sys.stderr)
    if result.payload is None:
        _emit(None)
    elif args.mode == "full":
        _emit(result.payload)
    else:
        _emit(result.payload.to_list())
    return 0


def cmd_predict(args) -> int:
    from .harness import EditRequest, generate_many, make_client

    examples = metrics.load_corpus(args.corpus)
    requests = {
        ex.id: EditRequest(ex.input, ex.instruction, args.mode,
                           _shots(args, ex.instruction, exclude={ex.id}), KeyPolicy(args.seed))
        for ex in examples
    }
    results = generate_many(make_client(args.client), requests, parallelism=args.parallelism)
    rows = []
    total_in = total_out = 0
    for ex in examples:
        result = results[ex.id]
        total_in += result.usage.input_tokens
        total_out += result.usage.output_tokens
        rows.append({"id": ex.id, **_result_record(result),
                     "usage": {"input_tokens": result.usage.input_tokens,
                               "output_tokens": result.usage.output_tokens}})
    if args.out:
        metrics.write_jsonl(args.out, rows)
    else:
        for row in rows:
            sys.stdout.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")
    print(f"usage: input_tokens={total_in} output_tokens={total_out}", file=sys.stderr)
    return 0


def cmd_judge(args) -> int:
    from .harness import judge_pair, make_client

    verdict = judge_pair(make_client(args.client), _read_json(args.original), _read_json(args.w),
                         _read_json(args.v), args.command, debias=not args.single)
    _emit({"quality_answer": verdict.value})
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="easepatch", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    ease = sub.add_parser("ease", help="stable-key list encoding")
    ease_sub = ease.add_subparsers(dest="action", required=True)
    for action in ("encode", "decode", "validate"):
        p = ease_sub.add_parser(action)
        p.add_argument("input")
        if action == "encode":
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=cmd_ease)

    patch = sub.add_parser("patch", help="apply or dry-run an RFC 6902 patch")
    patch_sub = patch.add_subparsers(dest="action", required=True)
    for action in ("apply", "validate"):
        p = patch_sub.add_parser(action)
        p.add_argument("doc")
        p.add_argument("patch")
        p.set_defaults(func=cmd_patch)

    p = sub.add_parser("diff", help="compute a patch turning A into B")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--ease", action="store_true", help="both inputs are EASE documents sharing keys")
    p.add_argument("--array-strategy", choices=("lcs", "positional"), default="lcs")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("translate", help="lower an EASE patch to a standard patch")
    p.add_argument("original")
    p.add_argument("ease_patch")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("eval", help="score predictions against a corpus")
    p.add_argument("corpus")
    p.add_argument("predictions")
    p.add_argument("--mode", choices=("standard", "ease"), default="standard")
    p.add_argument("--seed", type=int, default=0, help="key seed used to encode inputs in ease mode")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_eval)

    dataset = sub.add_parser("dataset", help="synthetic dataset generation")
    dataset_sub = dataset.add_subparsers(dest="action", required=True)
    p = dataset_sub.add_parser("synth")
    p.add_argument("schema", help="schema description (free text or JSON Schema)")
    p.add_argument("--counts", type=_parse_counts, required=True, metavar="S,C,X,L")
    p.add_argument("--client", default="live")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-instance", type=int, default=4, help="edit requests per generated instance")
    p.add_argument("--out", help="corpus file (default stdout)")
    p.set_defaults(func=cmd_dataset)

    def model_args(p):
        p.add_argument("--mode", choices=("standard", "ease", "full"), default="standard")
        p.add_argument("--shots", type=int, default=0)
        p.add_argument("--pool", help="corpus to draw few-shot examples from")
        p.add_argument("--client", default="live")
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("edit", help="ask a model to edit one document")
    p.add_argument("doc")
    p.add_argument("instruction")
    model_args(p)
    p.set_defaults(func=cmd_edit)

    p = sub.add_parser("predict", help="run edit over every example of a corpus")
    p.add_argument("corpus")
    model_args(p)
    p.add_argument("--parallelism", type=int, default=1)
    p.add_argument("--out", help="predictions file (default stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("judge", help="compare two edited documents with an LLM judge")
    p.add_argument("original")
    p.add_argument("w")
    p.add_argument("v")
    p.add_argument("command")
    p.add_argument("--client", default="live")
    p.add_argument("--single", action="store_true", help="one judgement, no swapped re-check")
    p.set_defaults(func=cmd_judge)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args)
    except CliError as exc:
        kind, message, detail = exc.kind, str(exc), exc.detail
    except OSError as exc:
        kind, message, detail = "IOError", str(exc), ""
    except (ValueError, LookupError, RuntimeError) as exc:
        kind, message, detail = type(exc).__name__, str(exc), ""
        cause = getattr(exc, "cause", None)
        if cause is not None:
            detail = f"caused by {type(cause).__name__}: {cause}"
    print(f"error: {kind}: {' '.join(message.split())}", file=sys.stderr)
    if detail:
        print(detail, file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
