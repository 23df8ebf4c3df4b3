"""Random JSON documents and edits for property tests."""
from __future__ import annotations

import random
import string

from hypothesis import strategies as st

from easepatch.ease_codec import ORDER_KEY, ease_list_order, format_display_order, generate_key, is_ease_list
from easepatch.json_model import JsonPointer
from easepatch.patch_engine import PatchOp

KEY_CHARS = string.ascii_letters + "~/_ -"


def strict_equal(a, b) -> bool:
    """Equality that also distinguishes int from float and bool from int."""
    if type(a) is not type(b):
        return False
    if isinstance(a, list):
        return len(a) == len(b) and all(strict_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(strict_equal(a[k], b[k]) for k in a)
    return a == b


def random_scalar(rng: random.Random):
    choice = rng.randrange(6)
    if choice == 0:
        return None
    if choice == 1:
        return rng.random() < 0.5
    if choice == 2:
        return rng.randint(-1000, 1000)
    if choice == 3:
        return round(rng.uniform(-100, 100), rng.randint(0, 4))
    return "".join(rng.choice(string.ascii_letters + " ") for _ in range(rng.randint(0, 8)))


def random_key(rng: random.Random) -> str:
    return "".join(rng.choice(KEY_CHARS) for _ in range(rng.randint(0, 6)))


def random_doc(rng: random.Random, depth: int = 5, max_len: int = 20):
    """Random document of nesting depth at most ``depth``; arrays hold at most ``max_len`` items."""
    if depth <= 1 or rng.random() < 0.3:
        return random_scalar(rng)
    if rng.random() < 0.5:
        # favour small arrays while still reaching the cap now and then
        n = rng.randint(0, max_len) if rng.random() < 0.2 else rng.randint(0, 4)
        return [random_doc(rng, depth - 1, max_len) for _ in range(n)]
    obj = {}
    for _ in range(rng.randint(0, 4)):
        key = random_key(rng)
        if key != ORDER_KEY:
            obj[key] = random_doc(rng, depth - 1, max_len)
    return obj


def mutate(rng: random.Random, doc, rate: float = 0.3):
    """A nearby document: some values changed, some array items dropped/inserted/reordered."""
    if rng.random() < rate * 0.3:
        return random_doc(rng, 3)
    if isinstance(doc, list):
        items = [mutate(rng, x, rate) for x in doc if rng.random() > rate * 0.5]
        for _ in range(rng.randint(0, 2) if rng.random() < rate else 0):
            items.insert(rng.randint(0, len(items)), random_doc(rng, 3))
        if len(items) > 1 and rng.random() < rate * 0.5:
            i, j = rng.randrange(len(items)), rng.randrange(len(items))
            items[i], items[j] = items[j], items[i]
        return items
    if isinstance(doc, dict):
        out = {k: mutate(rng, v, rate) for k, v in doc.items() if rng.random() > rate * 0.3}
        if rng.random() < rate:
            key = random_key(rng)
            if key != ORDER_KEY:
                out[key] = random_doc(rng, 3)
        return out
    return random_scalar(rng) if rng.random() < rate else doc


def ease_lists(doc, where=JsonPointer()):
    """Pointers to every EASE list in an encoded document."""
    found = []
    if isinstance(doc, dict):
        if is_ease_list(doc):
            found.append(where)
        for k, v in doc.items():
            if k != ORDER_KEY:
                found.extend(ease_lists(v, where / k))
    return found


def leaves(doc, where=JsonPointer()):
    """Pointers to every non-container value reachable through object members."""
    found = []
    if isinstance(doc, dict):
        for k, v in doc.items():
            if k == ORDER_KEY:
                continue
            found.extend(leaves(v, where / k))
    else:
        found.append(where)
    return found


def _resolve(doc, ptr):
    for t in ptr.tokens:
        doc = doc[t]
    return doc


def random_ease_edit(rng: random.Random, encoded, max_ops: int = 6) -> list[PatchOp]:
    """A valid EASE-level patch whose op paths are pairwise prefix-free.

    Mixes value replaces, element removal/addition (each with the matching
    order-string update) and pure reorders.
    """
    ops: list[PatchOp] = []
    used: list[JsonPointer] = []

    def free(ptr):
        return all(not p.is_prefix_of(ptr) and not ptr.is_prefix_of(p) for p in used)

    lists = ease_lists(encoded)
    rng.shuffle(lists)
    for lst in lists[: rng.randint(0, 3)]:
        order_ptr = lst / ORDER_KEY
        if not free(order_ptr):
            continue
        node = _resolve(encoded, lst)
        order = ease_list_order(node)
        new_order = list(order)
        touched = []
        for key in list(order):
            if rng.random() < 0.25 and free(lst / key):
                new_order.remove(key)
                touched.append(PatchOp("remove", lst / key))
        for _ in range(rng.randint(0, 2)):
            key = generate_key(set(order) | set(new_order), rng)
            new_order.insert(rng.randint(0, len(new_order)), key)
            touched.append(PatchOp("add", lst / key, random_scalar(rng)))
        if rng.random() < 0.5:
            rng.shuffle(new_order)
        if new_order == order and not touched:
            continue
        for op in touched:
            ops.append(op)
            used.append(op.path)
        ops.append(PatchOp("replace", order_ptr, format_display_order(new_order)))
        used.append(order_ptr)
    candidates = leaves(encoded)
    rng.shuffle(candidates)
    for ptr in candidates:
        if len(ops) >= max_ops:
            break
        if ptr.tokens and free(ptr):
            ops.append(PatchOp("replace", ptr, random_scalar(rng)))
            used.append(ptr)
    rng.shuffle(ops)
    return ops


# --------------------------------------------------------------------------
# hypothesis

scalars = st.one_of(
    st.none(),
    st.booleans(),
    st.integers(min_value=-(2**53), max_value=2**53),
    st.floats(allow_nan=False, allow_infinity=False),
    st.text(max_size=10),
)

object_keys = st.text(max_size=8).filter(lambda k: k != ORDER_KEY)

json_docs = st.recursive(
    scalars,
    lambda children: st.one_of(
        st.lists(children, max_size=20),
        st.dictionaries(object_keys, children, max_size=5),
    ),
    max_leaves=40,
)
