"""Patch-based JSON editing with stable-key list encoding."""
from .diff import DiffOptions, diff, diff_ease
from .ease_codec import (
    ORDER_KEY,
    KeyPolicy,
    decode,
    encode,
    format_display_order,
    generate_key,
    parse_display_order,
    validate_ease,
)
from .json_model import JsonPointer, dumps, json_equal, loads, parent_and_leaf, parse_pointer, resolve
from .metrics import EditExample, EvalReport, count_tokens, evaluate_corpus, execution_success, op_path_f1
from .patch_engine import Patch, PatchOp, apply_op, apply_patch, parse_patch, validate_patch
from .translate import ease_patch_to_standard, standard_patch_paths_to_ease, standard_patch_to_ease

__version__ = "0.1.0"
