"""RFC 6902 JSON Patch: parsing, application and dry-run validation.

Application never mutates its input.  Containers along each touched path are
copied; untouched subtrees are shared between input and output.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from .json_model import (
    JsonError,
    JsonParseError,
    JsonPointer,
    JsonValue,
    PathNotFound,
    TypeMismatch,
    array_index,
    as_pointer,
    dumps,
    dumps_compact,
    json_equal,
    kind,
    loads,
    parent_and_leaf,
    resolve,
)

OPS = ("add", "remove", "replace", "move", "copy", "test")
_NEEDS_VALUE = {"add", "replace", "test"}
_NEEDS_FROM = {"move", "copy"}


class PatchError(ValueError):
    pass


class InvalidPatch(PatchError):
    pass


class NotAnArray(InvalidPatch):
    pass


class UnknownOp(InvalidPatch):
    pass


class MissingField(InvalidPatch):
    pass


class TestFailed(PatchError):
    __test__ = False  # keep pytest from collecting this


class IndexOutOfBounds(PathNotFound):
    pass


class PatchConflict(PatchError):
    """The operation is well formed but makes no sense here (e.g. removing the root)."""


class PatchApplyError(PatchError):
    """Raised by :func:`apply_patch`; ``doc`` is the untouched input."""

    def __init__(self, index: int, op: "PatchOp", cause: Exception, doc: JsonValue):
        self.index = index
        self.op = op
        self.cause = cause
        self.doc = doc
        super().__init__(f"op {index} ({op.op} {str(op.path)!r}): {type(cause).__name__}: {cause}")


_MISSING: Any = type("Missing", (), {"__repr__": lambda self: "<missing>"})()


@dataclass(frozen=True)
class PatchOp:
    op: str
    path: JsonPointer
    value: Any = _MISSING
    from_: JsonPointer | None = None

    def __post_init__(self):
        if self.op not in OPS:
            raise UnknownOp(f"unknown op {self.op!r}")
        object.__setattr__(self, "path", as_pointer(self.path))
        if self.from_ is not None:
            object.__setattr__(self, "from_", as_pointer(self.from_))
        if self.op in _NEEDS_VALUE and self.value is _MISSING:
            raise MissingField(f"{self.op} requires 'value'")
        if self.op in _NEEDS_FROM and self.from_ is None:
            raise MissingField(f"{self.op} requires 'from'")
        if self.op not in _NEEDS_VALUE and self.value is not _MISSING:
            object.__setattr__(self, "value", _MISSING)
        if self.op not in _NEEDS_FROM and self.from_ is not None:
            object.__setattr__(self, "from_", None)

    @property
    def has_value(self) -> bool:
        return self.value is not _MISSING

    def to_dict(self) -> dict:
        out = {"op": self.op, "path": str(self.path)}
        if self.from_ is not None:
            out["from"] = str(self.from_)
        if self.has_value:
            out["value"] = self.value
        return out

    @classmethod
    def from_dict(cls, obj: Any) -> "PatchOp":
        if not isinstance(obj, dict):
            raise InvalidPatch(f"operation must be an object, got {kind(obj)}")
        if "op" not in obj:
            raise MissingField("operation has no 'op'")
        op = obj["op"]
        if op not in OPS:
            raise UnknownOp(f"unknown op {op!r}")
        if "path" not in obj:
            raise MissingField(f"{op} has no 'path'")
        if not isinstance(obj["path"], str):
            raise InvalidPatch("'path' must be a string")
        frm = obj.get("from")
        if frm is not None and not isinstance(frm, str):
            raise InvalidPatch("'from' must be a string")
        try:
            return cls(op, as_pointer(obj["path"]), obj.get("value", _MISSING),
                       as_pointer(frm) if frm is not None else None)
        except JsonError as exc:
            raise InvalidPatch(str(exc)) from exc

    def __eq__(self, other):
        if not isinstance(other, PatchOp):
            return NotImplemented
        if (self.op, self.path, self.from_) != (other.op, other.path, other.from_):
            return False
        if self.has_value != other.has_value:
            return False
        return not self.has_value or json_equal(self.value, other.value)

    __hash__ = None


def add(path, value) -> PatchOp:
    return PatchOp("add", as_pointer(path), value)


def remove(path) -> PatchOp:
    return PatchOp("remove", as_pointer(path))


def replace(path, value) -> PatchOp:
    return PatchOp("replace", as_pointer(path), value)


@dataclass(frozen=True)
class Patch:
    ops: tuple[PatchOp, ...] = field(default=())

    def __init__(self, ops: Iterable[PatchOp] = ()):
        object.__setattr__(self, "ops", tuple(ops))

    def __iter__(self) -> Iterator[PatchOp]:
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def __getitem__(self, i):
        return self.ops[i]

    def __add__(self, other: "Patch") -> "Patch":
        return Patch(self.ops + tuple(other))

    def to_list(self) -> list[dict]:
        return [op.to_dict() for op in self.ops]

    def dumps(self, compact: bool = False) -> str:
        return dumps_compact(self.to_list()) if compact else dumps(self.to_list())


def parse_patch(source: str | bytes | list) -> Patch:
    """Build a :class:`Patch` from JSON text or an already-decoded list."""
    if isinstance(source, (str, bytes)):
        try:
            source = loads(source)
        except JsonParseError as exc:
            raise InvalidPatch(f"patch is not valid JSON: {exc}") from exc
    if isinstance(source, Patch):
        return source
    if not isinstance(source, list):
        raise NotAnArray(f"patch must be a JSON array, got {kind(source)}")
    ops = []
    for i, item in enumerate(source):
        try:
            ops.append(PatchOp.from_dict(item))
        except InvalidPatch as exc:
            raise type(exc)(f"op {i}: {exc}") from None
    return Patch(ops)


# --------------------------------------------------------------------------
# application


def _set_in(doc: JsonValue, ptr: JsonPointer, fn) -> JsonValue:
    """Rebuild ``doc`` with the container at ``ptr`` replaced by ``fn(container)``."""
    if not ptr.tokens:
        return fn(doc)
    head, rest = ptr.tokens[0], JsonPointer(ptr.tokens[1:])
    if isinstance(doc, dict):
        if head not in doc:
            raise PathNotFound(f"key {head!r} not found")
        out = dict(doc)
        out[head] = _set_in(doc[head], rest, fn)
        return out
    if isinstance(doc, list):
        i = array_index(head, len(doc))
        out = list(doc)
        out[i] = _set_in(doc[i], rest, fn)
        return out
    raise TypeMismatch(f"cannot index {kind(doc)} with {head!r}")


def _add(doc, path: JsonPointer, value):
    if not path.tokens:
        return value
    parent, leaf = parent_and_leaf(path)

    def put(container):
        if isinstance(container, dict):
            out = dict(container)
            out[leaf] = value
            return out
        if isinstance(container, list):
            try:
                i = array_index(leaf, len(container), allow_end=True)
            except PathNotFound as exc:
                raise IndexOutOfBounds(str(exc)) from None
            return container[:i] + [value] + container[i:]
        raise TypeMismatch(f"cannot add {leaf!r} to {kind(container)}")

    return _set_in(doc, parent, put)


def _remove(doc, path: JsonPointer):
    if not path.tokens:
        raise PatchConflict("cannot remove the document root")
    parent, leaf = parent_and_leaf(path)

    def drop(container):
        if isinstance(container, dict):
            if leaf not in container:
                raise PathNotFound(f"key {leaf!r} not found")
            return {k: v for k, v in container.items() if k != leaf}
        if isinstance(container, list):
            i = array_index(leaf, len(container))
            return container[:i] + container[i + 1:]
        raise TypeMismatch(f"cannot remove {leaf!r} from {kind(container)}")

    return _set_in(doc, parent, drop)


def _replace(doc, path: JsonPointer, value):
    if not path.tokens:
        return value
    parent, leaf = parent_and_leaf(path)

    def swap(container):
        if isinstance(container, dict):
            if leaf not in container:
                raise PathNotFound(f"key {leaf!r} not found")
            out = dict(container)
            out[leaf] = value
            return out
        if isinstance(container, list):
            i = array_index(leaf, len(container))
            out = list(container)
            out[i] = value
            return out
        raise TypeMismatch(f"cannot replace {leaf!r} in {kind(container)}")

    return _set_in(doc, parent, swap)


def apply_op(doc: JsonValue, op: PatchOp) -> JsonValue:
    """Apply a single operation and return the new document."""
    if op.op == "add":
        return _add(doc, op.path, op.value)
    if op.op == "remove":
        return _remove(doc, op.path)
    if op.op == "replace":
        return _replace(doc, op.path, op.value)
    if op.op == "test":
        actual = resolve(doc, op.path)
        if not json_equal(actual, op.value):
            raise TestFailed(f"value at {str(op.path)!r} does not match")
        return doc
    if op.op == "copy":
        return _add(doc, op.path, resolve(doc, op.from_))
    if op.op == "move":
        if op.from_ == op.path:
            resolve(doc, op.from_)
            return doc
        if op.from_.is_prefix_of(op.path):
            raise PatchConflict(f"cannot move {str(op.from_)!r} into its own child")
        value = resolve(doc, op.from_)
        return _add(_remove(doc, op.from_), op.path, value)
    raise UnknownOp(op.op)


def apply_patch(doc: JsonValue, patch: Patch | Iterable[PatchOp]) -> JsonValue:
    """Apply ``patch`` atomically.

    On failure a :class:`PatchApplyError` carrying the failing op index and the
    original document is raised; nothing partial escapes.
    """
    current = doc
    for i, op in enumerate(patch):
        try:
            current = apply_op(current, op)
        except (JsonError, PatchError) as exc:
            raise PatchApplyError(i, op, exc, doc) from exc
    return current


@dataclass(frozen=True)
class PatchIssue:
    index: int
    op: PatchOp
    error: str
    message: str

    def __str__(self) -> str:
        return f"op {self.index} {self.op.op} {str(self.op.path)!r}: {self.error}: {self.message}"


def validate_patch(patch: Patch, doc: JsonValue) -> list[PatchIssue]:
    """Dry-run ``patch`` on ``doc``.

    A failing op is recorded and skipped so later ops are still checked
    against the best available state.
    """
    issues = []
    current = doc
    for i, op in enumerate(patch):
        try:
            current = apply_op(current, op)
        except (JsonError, PatchError) as exc:
            issues.append(PatchIssue(i, op, type(exc).__name__, str(exc)))
    return issues
