"""Structural diff producing RFC 6902 patches.

The defining contract is ``apply_patch(a, diff(a, b)) == b``.

Arrays are aligned with a longest common subsequence over deep equality.  In
each gap between matched elements, leftover old and new elements are paired
(positionally when the gap is balanced, by content similarity otherwise) and
diffed recursively; whatever remains unpaired is removed (highest index
first) or added (lowest index first).  Op emission order for an
array is: in-place changes at old indices, then removes, then adds at new
indices, so every index is valid at the moment its op runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from difflib import SequenceMatcher
from typing import Literal

from .ease_codec import ORDER_KEY, NotEase, validate_ease
from .json_model import JsonPointer, JsonValue, canonical_key, json_equal, kind
from .patch_engine import Patch, PatchOp


@dataclass(frozen=True)
class DiffOptions:
    array_strategy: Literal["lcs", "positional"] = "lcs"
    ease_aware: bool = False

    def __post_init__(self):
        if self.array_strategy not in ("lcs", "positional"):
            raise ValueError(f"unknown array strategy {self.array_strategy!r}")


def diff(a: JsonValue, b: JsonValue, opts: DiffOptions = DiffOptions()) -> Patch:
    if opts.ease_aware:
        _require_ease(a, b)
    ops: list[PatchOp] = []
    _diff(a, b, JsonPointer(), opts.array_strategy, ops)
    return Patch(ops)


def diff_ease(a: JsonValue, b: JsonValue) -> Patch:
    """Diff two EASE documents whose shared keys name the same elements.

    EASE lists are objects, so plain key-wise diffing already gives the wanted
    shape: ``add``/``remove`` per element key and at most one ``replace`` of the
    order string.
    """
    return diff(a, b, DiffOptions(ease_aware=True))


def _require_ease(a, b):
    for name, doc in (("a", a), ("b", b)):
        problems = validate_ease(doc)
        if problems:
            raise NotEase(f"{name} is not a valid EASE document: " + "; ".join(map(str, problems)))


def _diff(a, b, where: JsonPointer, strategy: str, ops: list[PatchOp]):
    ka, kb = kind(a), kind(b)
    if ka == kb == "object":
        _diff_object(a, b, where, strategy, ops)
    elif ka == kb == "array":
        if strategy == "lcs":
            _diff_array_lcs(a, b, where, strategy, ops)
        else:
            _diff_array_positional(a, b, where, strategy, ops)
    elif not json_equal(a, b):
        ops.append(PatchOp("replace", where, b))


def _diff_object(a: dict, b: dict, where, strategy, ops):
    for key in a:
        if key not in b:
            ops.append(PatchOp("remove", where / key))
    for key in a:
        if key in b and key != ORDER_KEY:
            _diff(a[key], b[key], where / key, strategy, ops)
    for key in b:
        if key not in a:
            ops.append(PatchOp("add", where / key, b[key]))
    # an EASE order string changes after the entries it names exist
    if ORDER_KEY in a and ORDER_KEY in b:
        _diff(a[ORDER_KEY], b[ORDER_KEY], where / ORDER_KEY, strategy, ops)


def _diff_array_positional(a: list, b: list, where, strategy, ops):
    for i in range(min(len(a), len(b))):
        _diff(a[i], b[i], where / i, strategy, ops)
    for i in range(len(a) - 1, len(b) - 1, -1):
        ops.append(PatchOp("remove", where / i))
    for i in range(len(a), len(b)):
        ops.append(PatchOp("add", where / i, b[i]))


def _diff_array_lcs(a: list, b: list, where, strategy, ops):
    pairs, removed, added = align(a, b)
    for i, j in pairs:
        _diff(a[i], b[j], where / i, strategy, ops)
    for i in reversed(removed):
        ops.append(PatchOp("remove", where / i))
    for j in added:
        ops.append(PatchOp("add", where / j, b[j]))


def lcs_matches(a: list, b: list) -> list[tuple[int, int]]:
    """Index pairs of one longest common subsequence under deep equality."""
    ka = [canonical_key(x) for x in a]
    kb = [canonical_key(x) for x in b]
    lo = 0
    while lo < len(ka) and lo < len(kb) and ka[lo] == kb[lo]:
        lo += 1
    hi_a, hi_b = len(ka), len(kb)
    while hi_a > lo and hi_b > lo and ka[hi_a - 1] == kb[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    mid_a, mid_b = ka[lo:hi_a], kb[lo:hi_b]
    n, m = len(mid_a), len(mid_b)
    # suffix table: table[i][j] = LCS length of mid_a[i:], mid_b[j:]
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = table[i], table[i + 1]
        for j in range(m - 1, -1, -1):
            if mid_a[i] == mid_b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = max(below[j], row[j + 1])
    middle = []
    i = j = 0
    while i < n and j < m:
        if mid_a[i] == mid_b[j]:
            middle.append((lo + i, lo + j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    head = [(k, k) for k in range(lo)]
    tail = [(hi_a + k, hi_b + k) for k in range(len(ka) - hi_a)]
    return head + middle + tail


def align(a: list, b: list) -> tuple[list[tuple[int, int]], list[int], list[int]]:
    """Align two arrays for diffing.

    Returns ``(changed, removed, added)``: index pairs of elements that sit in
    the same gap between LCS matches and are diffed in place, old indices to
    remove, and new indices to insert.  LCS-matched elements are omitted since
    they need no ops.
    """
    changed, removed, added = [], [], []
    prev_i = prev_j = -1
    for i, j in lcs_matches(a, b) + [(len(a), len(b))]:
        gap_a = list(range(prev_i + 1, i))
        gap_b = list(range(prev_j + 1, j))
        pairs = _pair_gap(a, b, gap_a, gap_b)
        paired_a = {p for p, _ in pairs}
        paired_b = {q for _, q in pairs}
        changed.extend(pairs)
        removed.extend(p for p in gap_a if p not in paired_a)
        added.extend(q for q in gap_b if q not in paired_b)
        prev_i, prev_j = i, j
    return changed, removed, added


def similarity(x: JsonValue, y: JsonValue) -> float:
    """Rough likeness in [0, 1]: equal values score 1, strings by edit ratio,
    objects by the mean over their combined members, anything else 0."""
    if json_equal(x, y):
        return 1.0
    if isinstance(x, str) and isinstance(y, str):
        return SequenceMatcher(None, x, y, autojunk=False).ratio()
    if isinstance(x, dict) and isinstance(y, dict):
        keys = x.keys() | y.keys()
        return sum(similarity(x[k], y[k]) for k in x.keys() & y.keys()) / len(keys)
    return 0.0


def _pair_gap(a, b, gap_a: list[int], gap_b: list[int]) -> list[tuple[int, int]]:
    """Order-preserving pairing of ``min(len)`` gap elements.

    Equal-length gaps pair positionally.  Otherwise the surplus elements of
    the longer side are chosen to maximize total :func:`similarity`; ties fall
    back to pairing the earliest elements.
    """
    if len(gap_a) == len(gap_b) or not gap_a or not gap_b:
        k = min(len(gap_a), len(gap_b))
        return list(zip(gap_a[:k], gap_b[:k]))
    flip = len(gap_a) < len(gap_b)
    long_, short = (gap_b, gap_a) if flip else (gap_a, gap_b)

    def sim(li, si):
        return similarity(a[short[si]], b[long_[li]]) if flip else similarity(a[long_[li]], b[short[si]])

    n, m = len(long_), len(short)
    neg = float("-inf")
    # best[i][j]: best score pairing the first j short elements within the first i long ones
    best = [[neg] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        best[i][0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, min(i, m) + 1):
            best[i][j] = max(best[i - 1][j], best[i - 1][j - 1] + sim(i - 1, j - 1))
    pairs = []
    i, j = n, m
    while j > 0:
        if i > j and best[i - 1][j] >= best[i][j]:
            i -= 1
        else:
            pairs.append((long_[i - 1], short[j - 1]))
            i -= 1
            j -= 1
    pairs.reverse()
    return [(s, l) for l, s in pairs] if flip else pairs


def correspondence(a: list, b: list) -> dict[int, int]:
    """Map new index -> old index for every element of ``b`` that descends from ``a``."""
    changed, _, _ = align(a, b)
    mapping = {j: i for i, j in lcs_matches(a, b)}
    mapping.update({j: i for i, j in changed})
    return mapping
