import json

import pytest
from hypothesis import given

from easepatch.json_model import PathNotFound, TypeMismatch
from easepatch.patch_engine import (
    IndexOutOfBounds,
    InvalidPatch,
    MissingField,
    NotAnArray,
    Patch,
    PatchApplyError,
    PatchConflict,
    PatchOp,
    TestFailed,
    UnknownOp,
    add,
    apply_op,
    apply_patch,
    parse_patch,
    remove,
    replace,
    validate_patch,
)

from docgen import json_docs


def test_parse_users_patch(users_patch_text):
    patch = parse_patch(users_patch_text)
    assert patch == Patch([replace("/users/0/name", "John"), add("/users/1", {"name": "Sam"})])
    # emitted paths always carry the leading slash
    assert [op["path"] for op in patch.to_list()] == ["/users/0/name", "/users/1"]


def test_users_patch_application(users_patch_text, users_doc):
    assert apply_patch(users_doc, parse_patch(users_patch_text)) == {
        "users": [{"name": "John"}, {"name": "Sam"}]
    }


@pytest.mark.parametrize(
    "source, error",
    [
        ('{"op": "add"}', NotAnArray),
        ("[{}]", MissingField),
        ('[{"op": "jump", "path": "/a"}]', UnknownOp),
        ('[{"op": "add", "path": "/a"}]', MissingField),
        ('[{"op": "move", "path": "/a"}]', MissingField),
        ('[{"op": "remove"}]', MissingField),
        ('[{"op": "remove", "path": 3}]', InvalidPatch),
        ('[{"op": "remove", "path": "/a~9"}]', InvalidPatch),
        ("[1]", InvalidPatch),
        ("[", InvalidPatch),
    ],
)
def test_parse_errors(source, error):
    with pytest.raises(error):
        parse_patch(source)


def test_add_null_value_is_kept():
    patch = parse_patch('[{"op": "add", "path": "/a", "value": null}]')
    assert apply_patch({}, patch) == {"a": None}
    assert patch.to_list() == [{"op": "add", "path": "/a", "value": None}]


def test_serialization_round_trip(users_patch_text):
    patch = parse_patch(users_patch_text)
    assert parse_patch(patch.dumps()) == patch
    assert parse_patch(patch.to_list()) == patch
    moved = parse_patch('[{"op": "move", "from": "/a", "path": "/b"}]')
    assert moved.to_list() == [{"op": "move", "path": "/b", "from": "/a"}]


# RFC 6902 behaviour, one case per rule


def test_add_dash_appends():
    assert apply_op([1, 2], add("/-", 3)) == [1, 2, 3]


def test_add_at_length_appends():
    assert apply_op([1, 2], add("/2", 3)) == [1, 2, 3]


def test_add_past_length_fails():
    with pytest.raises(IndexOutOfBounds):
        apply_op([1, 2], add("/3", 3))


def test_add_inserts_and_shifts():
    assert apply_op(["a", "c"], add("/1", "b")) == ["a", "b", "c"]


def test_add_replaces_existing_member():
    assert apply_op({"a": 1}, add("/a", 2)) == {"a": 2}


def test_add_to_missing_parent_fails():
    with pytest.raises(PathNotFound):
        apply_op({}, add("/a/b", 1))


def test_add_root_replaces_document():
    assert apply_op({"a": 1}, add("", [1])) == [1]


def test_remove_shifts_indices():
    assert apply_op(["a", "b", "c"], remove("/0")) == ["b", "c"]


def test_remove_errors():
    with pytest.raises(PathNotFound):
        apply_op({"a": 1}, remove("/b"))
    with pytest.raises(PathNotFound):
        apply_op([1], remove("/-"))
    with pytest.raises(PatchConflict):
        apply_op({"a": 1}, remove(""))


def test_replace_requires_existence():
    assert apply_op({"a": 1}, replace("/a", 2)) == {"a": 2}
    with pytest.raises(PathNotFound):
        apply_op({"a": 1}, replace("/b", 2))
    with pytest.raises(PathNotFound):
        apply_op([0], replace("/1", 2))
    with pytest.raises(TypeMismatch):
        apply_op({"a": 1}, replace("/a/b", 2))


def test_test_op():
    doc = {"a": [1, {"b": 2.0}]}
    assert apply_op(doc, PatchOp("test", "/a", value=[1, {"b": 2}])) is doc
    with pytest.raises(TestFailed):
        apply_op(doc, PatchOp("test", "/a/0", value=True))


def test_move():
    assert apply_op({"a": 1, "b": {}}, PatchOp("move", "/b/c", from_="/a")) == {"b": {"c": 1}}
    assert apply_op([1, 2, 3], PatchOp("move", "/2", from_="/0")) == [2, 3, 1]
    with pytest.raises(PatchConflict):
        apply_op({"a": {"b": 1}}, PatchOp("move", "/a/b/c", from_="/a"))
    assert apply_op({"a": 1}, PatchOp("move", "/a", from_="/a")) == {"a": 1}


def test_copy():
    out = apply_op({"a": {"x": [1]}}, PatchOp("copy", "/b", from_="/a"))
    assert out == {"a": {"x": [1]}, "b": {"x": [1]}}
    with pytest.raises(PathNotFound):
        apply_op({}, PatchOp("copy", "/b", from_="/a"))


def test_escaped_paths():
    assert apply_op({"a/b": {"~": 1}}, replace("/a~1b/~0", 2)) == {"a/b": {"~": 2}}


def test_apply_is_atomic_and_reports_index(frozen):
    doc = {"users": [{"name": "Ann"}]}
    before = frozen(doc)
    patch = Patch([replace("/users/0/name", "X"), remove("/users/4")])
    with pytest.raises(PatchApplyError) as info:
        apply_patch(doc, patch)
    assert info.value.index == 1
    assert isinstance(info.value.cause, PathNotFound)
    assert info.value.doc == before
    assert doc == before


def test_apply_never_mutates_input(scene, frozen):
    before = frozen(scene)
    patch = Patch([
        replace("/Scene/weather", "Rain"),
        remove("/Scene/shots/0"),
        add("/Scene/shots/-", {"shot_type": "Wide"}),
    ])
    out = apply_patch(scene, patch)
    assert scene == before
    assert out["Scene"]["weather"] == "Rain"


def test_validate_patch(users_patch_text, users_doc):
    assert validate_patch(parse_patch(users_patch_text), users_doc) == []
    issues = validate_patch(Patch([remove("/users/3"), add("/users/-", 1), remove("/nope")]), users_doc)
    assert [(i.index, i.error) for i in issues] == [(0, "PathNotFound"), (2, "PathNotFound")]


def test_patch_equality_uses_number_policy():
    assert replace("/a", 1) == replace("/a", 1.0)
    assert replace("/a", 1) != replace("/a", True)
    assert Patch([add("/a", 1)]) + Patch([remove("/a")]) == Patch([add("/a", 1), remove("/a")])


@given(json_docs)
def test_empty_patch_is_identity(doc):
    assert apply_patch(doc, Patch()) == doc


@given(json_docs, json_docs)
def test_replace_root(doc, other):
    assert apply_patch(doc, Patch([replace("", other)])) == other


def test_patch_json_shape(users_patch_text):
    text = parse_patch(users_patch_text).dumps()
    assert json.loads(text) == [
        {"op": "replace", "path": "/users/0/name", "value": "John"},
        {"op": "add", "path": "/users/1", "value": {"name": "Sam"}},
    ]
